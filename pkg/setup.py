#!/usr/bin/env python3
"""
Setup script for the nu-Birnbaum-Saunders toolkit
"""

from setuptools import setup
from pathlib import Path

# Read the README file for long description
readme_path = Path(__file__).parent / "README.md"
long_description = readme_path.read_text(encoding="utf-8") if readme_path.exists() else ""

# Read requirements
def read_requirements():
    """Read requirements.txt and return list of dependencies"""
    requirements: list[str] = []
    try:
        with open("requirements.txt", "r", encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line and not line.startswith("#"):
                    requirements.append(line)
    except FileNotFoundError:
        requirements = [
            "numpy>=1.22",
            "scipy>=1.9",
            "psutil>=5.9.0",
        ]
    return requirements

setup(
    name="nubs-toolkit",
    version="1.0.0",
    description="Fitting, evaluation and goodness-of-fit for nu-Birnbaum-Saunders lifetime models",
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="nu-BS Toolkit Team",
    license="MIT",

    # Flat modules live in python/
    package_dir={'': 'python'},
    py_modules=[
        'normal_kernel',
        'nubs_cli',
        'nubs_config',
        'nubs_datasets',
        'nubs_errors',
        'nubs_estimation',
        'nubs_gof',
        'nubs_multivariate',
        'nubs_univariate',
    ],

    install_requires=read_requirements(),
    python_requires=">=3.9",

    entry_points={
        'console_scripts': [
            'nubs-toolkit=nubs_cli:main',
        ],
    },

    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    keywords="birnbaum-saunders fatigue lifetime reliability statistics mle",
    zip_safe=False,
)
