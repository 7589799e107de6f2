from setuptools import Extension, setup

# The compiled closure engine is an optimization, not a requirement; the
# pure-Python engine covers every case it covers.  Building without a C
# compiler just skips it.
setup(
    ext_modules=[
        Extension(
            "relim._boxes",
            sources=["src/relim/_boxes.c"],
            extra_compile_args=["-O2"],
            optional=True,
        )
    ]
)
