from setuptools import setup, find_packages

setup(
    name="skinperm",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    author="Tohidi",
    description="sub-THz skin permittivity characterization with an open-ended waveguide",
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10",
        "pydantic>=2.5",
        "joblib>=1.3",
        "rich>=13.0",
    ],
    extras_require={
        "test": ["pytest>=7.4", "hypothesis>=6.90"],
    },
    entry_points={
        "console_scripts": ["skinperm=skinperm.cli:main"],
    },
)
