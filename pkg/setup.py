# setup.py

from setuptools import setup, find_packages

setup(
    name="lp_homotopy",
    version="0.1.0",
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    include_package_data=True,
    package_data={'config': ['*.json']},
    install_requires=[
        'numpy>=1.24.0',
        'scipy>=1.10.0',
        'pandas>=2.0.0',
        'python-dotenv>=1.0.0',
        'click>=8.0.0',
    ],
    extras_require={
        'test': ['pytest>=7.0.0'],
    },
    entry_points={
        'console_scripts': [
            'lp-homotopy=interface.cli:cli',
        ],
    },
)
