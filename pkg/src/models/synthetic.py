import numpy as np

from src.models.plant import PlantDefinition


def harmonic_dynamics(x, k):
    return np.array([k[0] * x[1], -k[0] * x[0]])


def contracting_dynamics(x, k):
    return -k[0] * np.asarray(x, dtype=float)


def hopf_dynamics(x, k):
    mu = k[0]
    r2 = x[0] * x[0] + x[1] * x[1]
    return np.array([mu * x[0] - x[1] - x[0] * r2,
                     x[0] + mu * x[1] - x[1] * r2])


def harmonic_plant() -> PlantDefinition:
    return PlantDefinition(
        name='harmonic',
        dimension=2,
        dynamics=harmonic_dynamics,
        parameters=(1.0,),
        default_state=(1.0, 0.0),
        lower_bounds=(-2.0, -2.0),
        upper_bounds=(2.0, 2.0),
        variable_names=('x1', 'x2'),
        parameter_names=('omega',),
        description='x1 = cos(omega t), x2 = -sin(omega t) from (1, 0); period 2 pi / omega.',
    )


def contracting_plant() -> PlantDefinition:
    return PlantDefinition(
        name='contract',
        dimension=1,
        dynamics=contracting_dynamics,
        parameters=(1.0,),
        default_state=(1.0,),
        lower_bounds=(-2.0,),
        upper_bounds=(2.0,),
        variable_names=('x1',),
        parameter_names=('rate',),
        description='x = x0 exp(-rate t); converges to the steady state 0.',
    )


def hopf_plant() -> PlantDefinition:
    return PlantDefinition(
        name='hopf',
        dimension=2,
        dynamics=hopf_dynamics,
        parameters=(1.0,),
        default_state=(1.0, 0.0),
        lower_bounds=(-2.0, -2.0),
        upper_bounds=(2.0, 2.0),
        variable_names=('x1', 'x2'),
        parameter_names=('mu',),
        description='Supercritical Hopf normal form: r\' = mu r - r^3, theta\' = 1. '
                    'Limit cycle of radius sqrt(mu) for mu > 0, stable focus at 0 for mu <= 0.',
    )
