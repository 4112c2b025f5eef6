"""
Módulo de estimación de la correlación espacial de la interferencia en
canales de pocos rayos (ondas milimétricas).
Proporciona el estimador LS, la reconstrucción por proyección (PBCE) con
cuatro estimadores de desfases y la evaluación de tasas con blanqueo.
"""

__version__ = "1.0.0"
__author__ = "Proyecto de Tesis - UPIITA"

# Importaciones convenientes para el usuario del módulo
from .errores import (
    ErrorEstimador,
    ErrorArgumentoInvalido,
    ErrorConfiguracion,
    ErrorConvergencia,
    ErrorRango,
)

from .escenario import (
    ConfigEscenario,
    cargar_config,
    sortear_rayos,
    generar_muestras,
    covarianza_verdadera,
    ruido_para_rot,
)

from .covarianza import (
    estimacion_ls,
    reconstruccion_pbce,
    error_cuadratico,
    gamma_ls,
    gamma_pbce,
)

from .sin_rejilla import (
    ConfigSdp,
    resolver_sdp,
    descomposicion_vandermonde,
    estimacion_gae,
)

from .estimadores_angulo import (
    estimacion_sge,
    estimacion_gec,
    estimacion_music,
)

from .enlace import (
    EnlaceRealizacion,
    reporte_tasa,
    optimizar_delta,
)

from .experimento import (
    PlanExperimento,
    cargar_plan,
    ejecutar_experimento,
)

__all__ = [
    'ErrorEstimador',
    'ErrorArgumentoInvalido',
    'ErrorConfiguracion',
    'ErrorConvergencia',
    'ErrorRango',
    'ConfigEscenario',
    'cargar_config',
    'sortear_rayos',
    'generar_muestras',
    'covarianza_verdadera',
    'ruido_para_rot',
    'estimacion_ls',
    'reconstruccion_pbce',
    'error_cuadratico',
    'gamma_ls',
    'gamma_pbce',
    'ConfigSdp',
    'resolver_sdp',
    'descomposicion_vandermonde',
    'estimacion_gae',
    'estimacion_sge',
    'estimacion_gec',
    'estimacion_music',
    'EnlaceRealizacion',
    'reporte_tasa',
    'optimizar_delta',
    'PlanExperimento',
    'cargar_plan',
    'ejecutar_experimento',
]
