from source.experiments import Expand, Paths, PointerShift, PropagatorCheck, Spectrum, WeakValues


stage_classes = {
    'paths': Paths,
    'expand': Expand,
    'weakvalues': WeakValues,
    'pointer-shift': PointerShift,
    'spectrum': Spectrum,
    'propagator-check': PropagatorCheck,
}


def cast(stage, name):
    stage.__class__ = stage_classes[name]
