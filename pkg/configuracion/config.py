"""
Configuración centralizada del simulador de estimación de interferencia.
Todas las rutas, parámetros por defecto y constantes se definen aquí.
"""

import logging
import os
from math import pi
from pathlib import Path

# ============================================================================
# RUTAS BASE DEL PROYECTO
# ============================================================================

RUTA_PROYECTO = Path(__file__).parent.parent.absolute()

# ============================================================================
# RUTAS DE SALIDA
# ============================================================================

# NOTA: Todas las salidas van a "resultados" salvo que la CLI indique otra carpeta
RUTA_RESULTADOS = RUTA_PROYECTO / "resultados"

RUTA_REPORTES = RUTA_RESULTADOS / "reportes"
RUTA_VISUALIZACIONES = RUTA_RESULTADOS / "visualizaciones"
RUTA_PLANES = RUTA_PROYECTO / "planes"

# ============================================================================
# ESCENARIO POR DEFECTO
# ============================================================================

VELOCIDAD_LUZ = 299_792_458.0

N_ANTENAS_BS = 32
N_INTERFERENTES = 4
N_RAYOS = 3
N_ANTENAS_INT = 1
FRECUENCIA_PORTADORA = 28e9  # Hz
LONGITUD_ONDA = VELOCIDAD_LUZ / FRECUENCIA_PORTADORA
SOPORTE_AOA = pi / 6
INTERVALO_AOD = (0.0, pi)

# Geometría de las celdas vecinas
LADO_CELDA = 500.0  # metros
FRACCION_SEGMENTO = 0.5

# Usuario deseado
N_RAYOS_USUARIO = 1
POTENCIA_SIMBOLO_USUARIO = 1.0

# ============================================================================
# PARÁMETROS DE LOS ESTIMADORES
# ============================================================================

ETA_DEFAULT = 0.5
REJILLA_ETA = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
EPSILON_SDP = 1e-8
TOL_RESIDUO_SDP = 1e-6
MAX_ITER_SDP = 50_000
RHO_SDP = 1.0
RANK_TOL = 1e-6

T0_DEFAULT = 1
N_REJILLA_MUSIC = 1000

# Perturbación de fases duplicadas al construir la base de direcciones
TOL_DUPLICADOS = 1e-9
PERTURBACION_DUPLICADOS = 1e-7

# ============================================================================
# PARÁMETROS DEL EXPERIMENTO
# ============================================================================

ESTIMADORES_VALIDOS = ("LS", "PBCE-GAE", "PBCE-SGE", "PBCE-GEC", "PBCE-MUSIC", "PBCE-ID")
PASO_DELTA = 0.01
ENSAYOS_DEFAULT = 100
DIGITOS_CSV = 17

# Códigos de salida de la CLI
SALIDA_OK = 0
SALIDA_SIN_ESTIMADORES = 1
SALIDA_ERROR_CONFIG = 2
SALIDA_FALLOS_PARCIALES = 3
SALIDA_VALIDACION_FALLIDA = 4

# ============================================================================
# PARÁMETROS DE VISUALIZACIÓN
# ============================================================================

DPI_GRAFICAS = 150
FIGSIZE_DEFAULT = (12, 6)

# ============================================================================
# CONFIGURACIÓN DE LOGGING
# ============================================================================

NIVEL_LOG = os.environ.get("ESTIMADOR_NIVEL_LOG", "INFO")  # DEBUG, INFO, WARNING, ERROR
FORMATO_LOG = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


# ============================================================================
# FUNCIONES AUXILIARES
# ============================================================================

def configurar_registro(nivel=None):
    """
    Configura el logging raíz del proyecto.

    Args:
        nivel (str): Nivel de log; si None usa NIVEL_LOG

    Returns:
        logging.Logger: Logger del paquete
    """
    nivel = (nivel or NIVEL_LOG).upper()
    logging.basicConfig(level=getattr(logging, nivel, logging.INFO), format=FORMATO_LOG)
    logger = logging.getLogger("estimador_interferencia")
    logger.setLevel(getattr(logging, nivel, logging.INFO))
    return logger


def asegurar_directorios(*rutas):
    """
    Crea las carpetas de salida si no existen.
    """
    if not rutas:
        rutas = (RUTA_REPORTES, RUTA_VISUALIZACIONES)
    for ruta in rutas:
        Path(ruta).mkdir(exist_ok=True, parents=True)


def obtener_hilos(por_defecto=1):
    """
    Número de hilos para los ensayos; la variable ESTIMADOR_HILOS tiene prioridad.
    """
    valor = os.environ.get("ESTIMADOR_HILOS")
    if valor is None:
        return por_defecto
    try:
        return max(1, int(valor))
    except ValueError:
        return por_defecto


if __name__ == "__main__":
    print("=" * 80)
    print("CONFIGURACIÓN ACTIVA")
    print("=" * 80)

    print(f"\nRuta del proyecto: {RUTA_PROYECTO}")
    print(f"Ruta de resultados: {RUTA_RESULTADOS}")
    print(f"\nEscenario: N={N_ANTENAS_BS}, L={N_INTERFERENTES}, N_g={N_RAYOS}, N_I={N_ANTENAS_INT}")
    print(f"Portadora: {FRECUENCIA_PORTADORA / 1e9:.1f} GHz (λ = {LONGITUD_ONDA * 1e3:.3f} mm)")
    print(f"Estimadores: {', '.join(ESTIMADORES_VALIDOS)}")
    print(f"SDP: η={ETA_DEFAULT}, ε={EPSILON_SDP}, máx. iteraciones={MAX_ITER_SDP}")
    print(f"Nivel de log: {NIVEL_LOG}")
