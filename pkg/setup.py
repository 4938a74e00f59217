# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import setuptools

with open("README.md", "r", encoding='utf_8') as fh:
    long_description = fh.read()

install_requires=[
    'numpy>=1.19', 'scipy>=1.7',
    'tqdm', 'psutil', 'pyyaml', 'overrides', 'runstats',
    'ray>=0.8.7', 'Send2Trash'
]

setuptools.setup(
    name="fraclap",
    version="0.1.0",
    description="Fractional Laplacian solver and weighted analytic regularity verifier",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=['tests', 'tests.*']),
	license='MIT',
    classifiers=(
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ),
    include_package_data=True,
    data_files=[('confs', ['confs/fraclap.yaml']),
                ('confs/presets', ['confs/presets/getoor.json', 'confs/presets/zero.json',
                                   'confs/presets/lshape.json', 'confs/presets/sector.json',
                                   'confs/presets/square.json', 'confs/presets/sinus-extension.json',
                                   'confs/presets/xs-vertex.json', 'confs/presets/xs-vertex-eps0.json'])],
    install_requires=install_requires,
    extras_require={'test': ['pytest']},
    entry_points={'console_scripts': ['fraclap=fraclap.cli.main:main']}
)
