import re

from setuptools import setup

metadata = dict(
    re.findall("__([a-z]+)__ = '([^']+)'", open('normsim/__init__.py').read()))

requirements = [
    x.strip() for x
    in open('requirements.txt').readlines() if not x.startswith('#')]

description = "Seeded simulator of norm emergence through social " \
              "communication"

setup(
    name='python-normsim',
    version=metadata['version'],
    license='MIT',
    description=description,
    long_description='{0}\n\n{1}'.format(
        open('README.rst').read(),  # noqa
        open('CHANGELOG.rst').read()
    ),
    packages=['normsim'],
    install_requires=requirements,
    python_requires='>=3.7',
    tests_require=['pytest'],
    entry_points={
        'console_scripts': ['normsim = normsim.cli:main'],
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
    ],
)
