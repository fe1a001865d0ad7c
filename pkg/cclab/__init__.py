# cclab - constellation-constrained capacity of the two-user Gaussian interference channel

__version__ = "1.0.0"
