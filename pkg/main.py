import sys

from simcache.router.main import main

if __name__ == "__main__":
    sys.exit(main())
