import re

from setuptools import find_packages, setup

version_file = 'plastiplate/version.py'


def get_version():
    with open(version_file) as f:
        exec(compile(f.read(), version_file, 'exec'))
    return locals()['__version__']


def parse_requirements(fname='requirements/runtime.txt', with_version=True):
    """Read the requirement specifiers of ``fname``.

    Lines starting with ``-r`` include another file. Version constraints are
    dropped when ``with_version`` is False.
    """
    packages = []
    with open(fname) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            if line.startswith('-r '):
                packages += parse_requirements(line.split(' ')[1],
                                               with_version)
                continue
            if not with_version:
                line = re.split('(>=|==|>)', line, maxsplit=1)[0].strip()
            packages.append(line)
    return packages


setup(
    name='plastiplate',
    version=get_version(),
    description='Incremental Norton-Hoff simulation of perfectly plastic '
    'Kirchhoff-Love plates',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=('tests', )),
    include_package_data=True,
    classifiers=[
        'Development Status :: 3 - Alpha',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    python_requires='>=3.8',
    install_requires=parse_requirements(),
    extras_require={
        'tests': parse_requirements('requirements/tests.txt'),
    },
    entry_points={
        'console_scripts': ['plastiplate=plastiplate.cli:main'],
    },
)
