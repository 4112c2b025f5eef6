"""
Estimadores de desfases alternativos a GAE:
- SGE: GAE sobre la raíz cuadrada de la correlación LS truncada a rango S
- MUSIC: picos del pseudoespectro sobre una rejilla uniforme
- GEC: GAE por ventanas de T0 muestras fusionado por agrupamiento balanceado
"""

import logging
import warnings

import numpy as np
from scipy import linalg
from scipy.signal import find_peaks

from configuracion.config import N_REJILLA_MUSIC, T0_DEFAULT, RANK_TOL
from .agrupamiento import agrupar_fases
from .covarianza import eliminar_ruido, hermitizar
from .errores import ErrorArgumentoInvalido, ErrorEstimador, ErrorSinSubespacio
from .escenario import LoteMuestras, base_direcciones
from .sin_rejilla import estimacion_gae
from .tipos import EstimacionCovarianza, EstimacionFases, SGE, MUSIC, GEC

logger = logging.getLogger(__name__)


def _descomposicion_sin_ruido(ls, potencia_ruido):
    """Autovalores/autovectores de hermitizar(R̂_LS - σ²I), orden descendente."""
    matriz = hermitizar(eliminar_ruido(ls, potencia_ruido)).matriz
    autovalores, autovectores = linalg.eigh(matriz)
    return autovalores[::-1], autovectores[:, ::-1]


# ============================================================================
# SGE
# ============================================================================

def truncar_rango(ls, potencia_ruido, n_fuentes):
    """
    Raíz cuadrada truncada S = V_S diag(√λ_1..√λ_S) de la correlación sin ruido.

    Los autovalores negativos se llevan a 0.

    Returns:
        numpy.ndarray: Matriz N×S

    Raises:
        ErrorSinSubespacio: Si todos los autovalores son ≤ 0
    """
    autovalores, autovectores = _descomposicion_sin_ruido(ls, potencia_ruido)
    if autovalores.size == 0 or autovalores[0] <= 0:
        raise ErrorSinSubespacio("No hay subespacio de interferencia (autovalores ≤ 0)")
    dominantes = np.clip(autovalores[:n_fuentes], 0.0, None)
    return autovectores[:, :n_fuentes] * np.sqrt(dominantes)


def estimacion_sge(ls, potencia_ruido, n_fuentes, config=None, rank_tol=RANK_TOL):
    """
    SGE: GAE con T = S aplicado a las columnas de la raíz truncada.

    Args:
        ls (EstimacionCovarianza): Estimación LS
        potencia_ruido (float): σ²
        n_fuentes (int): S < N
        config (ConfigSdp): Parámetros del SDP

    Returns:
        EstimacionFases: etiqueta SGE
    """
    n = ls.n if isinstance(ls, EstimacionCovarianza) else np.asarray(ls).shape[0]
    if not 0 <= n_fuentes < n:
        raise ErrorArgumentoInvalido(f"SGE requiere S < N (S={n_fuentes}, N={n})")
    if n_fuentes == 0:
        return EstimacionFases(np.array([]), SGE)

    raiz = truncar_rango(ls, potencia_ruido, n_fuentes)
    gae = estimacion_gae(raiz.T, config, n_fuentes, rank_tol)
    return EstimacionFases(gae.valores, SGE, dict(gae.diagnosticos))


# ============================================================================
# MUSIC
# ============================================================================

def rejilla_music(n_rejilla):
    """θ_k = -1/2 + k/N_G, k = 0..N_G-1."""
    return -0.5 + np.arange(n_rejilla) / n_rejilla


def pseudoespectro_music(subespacio, rejilla):
    """
    P_MU(θ) = 1 / (a^H V V^H a) sobre la rejilla.

    Args:
        subespacio (numpy.ndarray): V (N×k)
        rejilla (array): Desfases evaluados
    """
    n = subespacio.shape[0]
    a = base_direcciones(n, rejilla).matriz
    proyeccion = np.sum(np.abs(subespacio.conj().T @ a) ** 2, axis=0)
    return 1.0 / np.maximum(proyeccion, np.finfo(float).tiny)


def _picos_circulares(espectro):
    """Índices de máximos locales considerando la rejilla como circular."""
    extendido = np.concatenate([espectro[-1:], espectro, espectro[:1]])
    picos, _ = find_peaks(extendido)
    return picos - 1


def estimacion_music(ls, potencia_ruido, n_fuentes, n_rejilla=N_REJILLA_MUSIC):
    """
    MUSIC sobre la correlación LS sin ruido.

    El subespacio de ruido lo forman los autovectores de los N-S autovalores
    menores. Si hay menos de S máximos locales se completa con los mayores
    valores restantes y se marca en los diagnósticos.

    Returns:
        EstimacionFases: etiqueta MUSIC
    """
    n = ls.n if isinstance(ls, EstimacionCovarianza) else np.asarray(ls).shape[0]
    if not 0 <= n_fuentes < n:
        raise ErrorArgumentoInvalido(f"MUSIC requiere S < N (S={n_fuentes}, N={n})")
    if n_rejilla < 2 * n_fuentes:
        raise ErrorArgumentoInvalido(f"La rejilla ({n_rejilla}) debe tener al menos 2S puntos")
    if n_fuentes == 0:
        return EstimacionFases(np.array([]), MUSIC)

    _, autovectores = _descomposicion_sin_ruido(ls, potencia_ruido)
    ruido = autovectores[:, n_fuentes:]
    rejilla = rejilla_music(n_rejilla)
    espectro = pseudoespectro_music(ruido, rejilla)

    picos = _picos_circulares(espectro)
    picos = picos[np.argsort(-espectro[picos], kind='stable')][:n_fuentes]
    relleno = n_fuentes - len(picos)
    if relleno > 0:
        restantes = np.setdiff1d(np.argsort(-espectro, kind='stable'), picos, assume_unique=True)
        # setdiff1d ordena; se recupera el orden por valor del espectro
        restantes = restantes[np.argsort(-espectro[restantes], kind='stable')]
        picos = np.concatenate([picos, restantes[:relleno]])
        mensaje = f"MUSIC encontró menos de {n_fuentes} picos; se completaron {relleno}"
        logger.warning(mensaje)
        warnings.warn(mensaje, RuntimeWarning)

    diagnosticos = {'n_rejilla': n_rejilla, 'relleno': int(max(relleno, 0))}
    return EstimacionFases(rejilla[picos], MUSIC, diagnosticos)


# ============================================================================
# GEC
# ============================================================================

class EstimadorGec:
    """
    GAE por ventanas con fusión por agrupamiento balanceado.

    Cada ventana aporta S desfases; tras n ventanas los n·S puntos se
    agrupan en S grupos de n puntos y la estimación son los centroides.
    """

    def __init__(self, n_fuentes, config=None, rng=None, rank_tol=RANK_TOL):
        self.n_fuentes = n_fuentes
        self.config = config
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.rank_tol = rank_tol
        self.fases_acumuladas = []
        self.ventanas_fallidas = 0
        self.iteraciones = 0
        self.ultimo_error = None

    @property
    def ventanas_validas(self):
        return len(self.fases_acumuladas)

    def agregar_ventana(self, ventana):
        """
        Procesa una ventana y devuelve la estimación actualizada
        (None si aún no hay ventanas válidas).
        """
        try:
            gae = estimacion_gae(ventana, self.config, self.n_fuentes, self.rank_tol)
        except ErrorEstimador as e:
            self.ventanas_fallidas += 1
            self.ultimo_error = e
            logger.warning("GEC: ventana descartada (%s)", e)
            return self.estimacion() if self.fases_acumuladas else None
        self.fases_acumuladas.append(np.asarray(gae.valores))
        self.iteraciones += int(gae.diagnosticos.get('iteraciones', 0))
        return self.estimacion()

    def estimacion(self):
        """Centroides del agrupamiento de todos los desfases acumulados."""
        if not self.fases_acumuladas:
            if self.ultimo_error is not None:
                raise self.ultimo_error
            raise ErrorArgumentoInvalido("GEC necesita al menos una ventana")
        puntos = np.concatenate(self.fases_acumuladas)
        estado = agrupar_fases(puntos, self.n_fuentes, self.rng)
        diagnosticos = {
            'ventanas': self.ventanas_validas,
            'ventanas_fallidas': self.ventanas_fallidas,
            'iteraciones': self.iteraciones,
            'tamanos_grupos': estado.tamanos().tolist(),
        }
        return EstimacionFases(estado.fases(), GEC, diagnosticos)


def estimacion_gec(ventanas, n_fuentes, config=None, tamano_ventana=T0_DEFAULT, rng=None,
                   rank_tol=RANK_TOL):
    """
    GEC sobre una secuencia de ventanas.

    Args:
        ventanas: Lista de LoteMuestras/arrays, o un LoteMuestras que se parte
            en ventanas de `tamano_ventana` muestras
        n_fuentes (int): S
        config (ConfigSdp): Parámetros del SDP de cada ventana
        tamano_ventana (int): T0
        rng (numpy.random.Generator): Inicialización del agrupamiento

    Returns:
        EstimacionFases: etiqueta GEC
    """
    if tamano_ventana < 1:
        raise ErrorArgumentoInvalido("T0 debe ser ≥ 1")
    if isinstance(ventanas, LoteMuestras):
        ventanas = ventanas.ventanas(tamano_ventana)
    if len(ventanas) == 0:
        raise ErrorArgumentoInvalido("GEC necesita al menos una ventana")
    if n_fuentes == 0:
        return EstimacionFases(np.array([]), GEC, {'ventanas': len(ventanas)})

    estimador = EstimadorGec(n_fuentes, config, rng, rank_tol)
    for ventana in ventanas:
        estimador.agregar_ventana(ventana)
    return estimador.estimacion()
