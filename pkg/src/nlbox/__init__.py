"""Boolean nonlocal boxes over GF(2): input spaces, affine symmetries, and CHSH-type bounds."""

__version__ = "0.1.0"
