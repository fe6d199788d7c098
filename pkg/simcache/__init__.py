# Cache hierarchy / multithreaded processor simulator
__version__ = "0.1.0"
