# Affine Quiver Package
# Representations of affine quivers, tubes, canonical basis parameters and Hall algebras

__version__ = "0.1.0"
