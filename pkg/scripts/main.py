# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Runs the fraclap command line from a source checkout, for example

    python scripts/main.py verify --preset xs-vertex --out ~/logdir/xs
"""

from fraclap.cli.main import main


if __name__ == '__main__':
    main()
