import sys

import mbwave.core

if __name__ == '__main__':
    sys.exit(mbwave.core.run())
