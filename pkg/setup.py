import os

from setuptools import setup, find_packages

from assocmem import __version__

with open(os.path.join(os.path.dirname(__file__), 'README.rst')) as readme:
    README = readme.read()

setup(
    name='django-assocmem',
    version=__version__,
    author='Shao Fei',
    author_email='shaofei330@gmail.com',
    description='Maximum likelihood associative memories for words with erasures, with trie, Hopfield and '
                'clique network baselines',
    long_description=README,
    license='BSD',
    keywords='associative memory maximum likelihood trie hopfield clique network erasure',
    packages=find_packages(exclude=['examples', 'examples.*']),
    install_requires=[
        'Django>=3.2',
        'numpy>=1.22',
        'scipy>=1.8',
    ],
    extras_require={
        'test': ['pytest'],
    },
    entry_points={
        'console_scripts': [
            'assocmem=assocmem.cli:main',
        ],
    },
    classifiers=[
        'Environment :: Console',
        'Framework :: Django',
        'Framework :: Django :: 3.2',
        'Framework :: Django :: 4.2',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.12',
        'Topic :: Scientific/Engineering :: Information Analysis',
    ],
    include_package_data=True,
)
