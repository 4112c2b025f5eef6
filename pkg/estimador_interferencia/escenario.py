"""
Módulo de escenario: geometría, canales de pocos rayos, muestras de
interferencia y ruido, y la matriz de correlación verdadera.

Convención de ejes: el AoA se mide desde la perpendicular (broadside) del
arreglo lineal de la BS principal, que apunta al este; el norte queda en +π/2.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from configuracion.config import (
    N_ANTENAS_BS,
    N_INTERFERENTES,
    N_RAYOS,
    N_ANTENAS_INT,
    LONGITUD_ONDA,
    SOPORTE_AOA,
    INTERVALO_AOD,
    LADO_CELDA,
    FRACCION_SEGMENTO,
    N_RAYOS_USUARIO,
    POTENCIA_SIMBOLO_USUARIO,
)
from .errores import ErrorArgumentoInvalido, ErrorConfiguracion, ErrorDimension
from .tipos import EstimacionCovarianza, VERDADERA

logger = logging.getLogger(__name__)

# Nombres de campo del documento JSON -> atributo de ConfigEscenario
CAMPOS_JSON = {
    'n_bs_antennas': 'n_antenas',
    'n_interferers': 'n_interferentes',
    'n_rays': 'n_rayos',
    'n_int_antennas': 'n_antenas_int',
    'noise_power': 'potencia_ruido',
    'symbol_power': 'potencia_simbolos',
    'carrier_wavelength': 'longitud_onda',
    'tx_spacing': 'separacion_tx',
    'rx_spacing': 'separacion_rx',
    'aoa_mean': 'aoa_media',
    'aoa_support': 'soporte_aoa',
    'aod_interval': 'intervalo_aod',
    'rng_seed': 'semilla',
    # Extensiones: potencia por rayo, geometría y usuario deseado
    'path_power': 'potencia_rayos',
    'cell_side': 'lado_celda',
    'segment_fraction': 'fraccion_segmento',
    'user_aoa_mean': 'aoa_usuario',
    'user_n_rays': 'n_rayos_usuario',
    'user_symbol_power': 'potencia_usuario',
}


# ============================================================================
# TIPOS DEL ESCENARIO
# ============================================================================

@dataclass
class ConfigEscenario:
    """
    Descripción generativa completa del escenario.

    potencia_simbolos acepta un escalar (R_J = p·I), la diagonal de R_J o la
    matriz completa N_I×N_I. aoa_media None coloca los interferentes con la
    geometría de celdas vecinas (colocar_interferentes).
    """
    n_antenas: int = N_ANTENAS_BS
    n_interferentes: int = N_INTERFERENTES
    n_rayos: int = N_RAYOS
    n_antenas_int: int = N_ANTENAS_INT
    potencia_ruido: float = 1.0
    potencia_simbolos: object = 1.0
    longitud_onda: float = LONGITUD_ONDA
    separacion_tx: float = LONGITUD_ONDA / 2
    separacion_rx: float = LONGITUD_ONDA / 2
    aoa_media: object = None
    soporte_aoa: float = SOPORTE_AOA
    intervalo_aod: tuple = INTERVALO_AOD
    semilla: int = 0
    potencia_rayos: object = None
    lado_celda: float = LADO_CELDA
    fraccion_segmento: float = FRACCION_SEGMENTO
    aoa_usuario: float = 0.0
    n_rayos_usuario: int = N_RAYOS_USUARIO
    potencia_usuario: float = POTENCIA_SIMBOLO_USUARIO
    _r_j: np.ndarray = field(init=False, repr=False, default=None)

    def __post_init__(self):
        validar_config(self)
        self._r_j = _matriz_simbolos(self.potencia_simbolos, self.n_antenas_int)

    @property
    def n_fuentes(self):
        """S = L·N_g."""
        return self.n_interferentes * self.n_rayos

    @property
    def r_j(self):
        """Correlación de los símbolos de cada interferente (N_I×N_I)."""
        return self._r_j

    def matriz_potencias(self):
        """Potencias P_{i,ℓ} con forma (L, N_g)."""
        if self.potencia_rayos is None:
            return np.ones((self.n_interferentes, self.n_rayos))
        p = np.broadcast_to(np.asarray(self.potencia_rayos, dtype=float),
                            (self.n_interferentes, self.n_rayos))
        return np.array(p)

    def medias_aoa(self, rng=None):
        """AoA medio por interferente (radianes)."""
        if self.aoa_media is not None:
            return np.broadcast_to(np.asarray(self.aoa_media, dtype=float),
                                   (self.n_interferentes,)).copy()
        geometria = colocar_interferentes(self.lado_celda, rng, self.n_interferentes,
                                          self.fraccion_segmento)
        return geometria['aoa_media']

    def a_dict(self):
        """Documento JSON con los nombres de campo públicos."""
        documento = {}
        for clave, atributo in CAMPOS_JSON.items():
            valor = getattr(self, atributo)
            if isinstance(valor, np.ndarray):
                valor = valor.tolist()
            elif isinstance(valor, tuple):
                valor = list(valor)
            documento[clave] = valor
        if np.iscomplexobj(np.asarray(self.potencia_simbolos)):
            m = np.asarray(self.potencia_simbolos)
            documento['symbol_power'] = {'re': m.real.tolist(), 'im': m.imag.tolist()}
        return documento


@dataclass
class ConjuntoRayos:
    """
    Rayos de todos los interferentes; cada arreglo tiene forma (L, N_g).

    Attributes:
        ganancias: v_{i,ℓ} complejas
        potencias: P_{i,ℓ}
        aoa, aod: Ángulos de llegada y salida (radianes)
        beta, gamma: Desfases de recepción y transmisión (ciclos)
    """
    ganancias: np.ndarray
    potencias: np.ndarray
    aoa: np.ndarray
    aod: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    @property
    def n_interferentes(self):
        return self.ganancias.shape[0]

    @property
    def n_rayos(self):
        return self.ganancias.shape[1]

    def fases_recepcion(self):
        """β en el orden de columnas de la base: por ℓ y dentro de ℓ por i."""
        return self.beta.ravel()


@dataclass
class BaseDirecciones:
    """Matriz A (N×S) de vectores de dirección y sus desfases."""
    matriz: np.ndarray
    fases: np.ndarray

    @property
    def n_fuentes(self):
        return self.matriz.shape[1]


@dataclass
class LoteMuestras:
    """
    T vectores recibidos N(t) (forma (T, N)) con sus componentes opcionales.
    """
    muestras: np.ndarray
    interferencia: np.ndarray = None
    ruido: np.ndarray = None
    simbolos: np.ndarray = None

    def __post_init__(self):
        self.muestras = np.atleast_2d(np.asarray(self.muestras, dtype=complex))

    @property
    def n_muestras(self):
        return self.muestras.shape[0]

    @property
    def n_antenas(self):
        return self.muestras.shape[1]

    def ventanas(self, tamano):
        """
        Divide el lote en ventanas consecutivas de `tamano` muestras.

        Las T mod tamano muestras finales no forman ventana y se descartan.
        """
        n_ventanas, sobrantes = divmod(self.n_muestras, tamano)
        if sobrantes:
            logger.debug("Ventanas de %d muestras: se descartan las %d últimas de T=%d",
                         tamano, sobrantes, self.n_muestras)
        return [LoteMuestras(self.muestras[k * tamano:(k + 1) * tamano])
                for k in range(n_ventanas)]


# ============================================================================
# VALIDACIÓN Y SERIALIZACIÓN
# ============================================================================

def _matriz_simbolos(potencia, n_antenas_int):
    """Construye R_J a partir de escalar, diagonal o matriz completa."""
    p = np.asarray(potencia)
    if p.ndim == 0:
        return float(p.real) * np.eye(n_antenas_int, dtype=complex)
    if p.ndim == 1:
        if p.shape[0] != n_antenas_int:
            raise ErrorConfiguracion("La diagonal de R_J debe tener N_I entradas")
        return np.diag(p.astype(complex))
    if p.shape != (n_antenas_int, n_antenas_int):
        raise ErrorConfiguracion(f"R_J debe ser {n_antenas_int}×{n_antenas_int}")
    return p.astype(complex)


def validar_config(cfg):
    """
    Verifica las invariantes del escenario.

    Raises:
        ErrorConfiguracion: Si algún campo está fuera de dominio
    """
    for nombre in ('n_antenas', 'n_rayos', 'n_antenas_int'):
        valor = getattr(cfg, nombre)
        if int(valor) != valor or valor < 1:
            raise ErrorConfiguracion(f"{nombre} debe ser un entero positivo (recibido {valor})")
    if int(cfg.n_interferentes) != cfg.n_interferentes or cfg.n_interferentes < 0:
        raise ErrorConfiguracion("n_interferentes debe ser un entero no negativo")
    if not cfg.potencia_ruido > 0:
        raise ErrorConfiguracion("La potencia de ruido σ² debe ser positiva")
    if not cfg.longitud_onda > 0:
        raise ErrorConfiguracion("La longitud de onda debe ser positiva")
    if cfg.separacion_rx / cfg.longitud_onda > 0.5 + 1e-12:
        logger.warning("D/λ = %.3f > 1/2: los desfases de recepción son ambiguos",
                       cfg.separacion_rx / cfg.longitud_onda)
    if cfg.soporte_aoa < 0:
        raise ErrorConfiguracion("El soporte del AoA no puede ser negativo")
    r_j = _matriz_simbolos(cfg.potencia_simbolos, cfg.n_antenas_int)
    if not np.allclose(r_j, r_j.conj().T, atol=1e-12):
        raise ErrorConfiguracion("R_J debe ser hermítica")
    if np.min(np.linalg.eigvalsh(r_j)) < -1e-12:
        raise ErrorConfiguracion("R_J debe ser semidefinida positiva")
    if cfg.potencia_rayos is not None and np.any(np.asarray(cfg.potencia_rayos, dtype=float) < 0):
        raise ErrorConfiguracion("Las potencias por rayo deben ser no negativas")


def config_desde_dict(documento):
    """
    Crea un ConfigEscenario desde un documento JSON ya decodificado.

    Raises:
        ErrorConfiguracion: Si hay claves desconocidas
    """
    desconocidas = sorted(set(documento) - set(CAMPOS_JSON))
    if desconocidas:
        raise ErrorConfiguracion(f"Claves desconocidas en el escenario: {', '.join(desconocidas)}")
    argumentos = {}
    for clave, valor in documento.items():
        if clave == 'symbol_power' and isinstance(valor, dict):
            valor = np.asarray(valor['re']) + 1j * np.asarray(valor['im'])
        if clave == 'aod_interval' and valor is not None:
            valor = tuple(valor)
        argumentos[CAMPOS_JSON[clave]] = valor
    try:
        return ConfigEscenario(**argumentos)
    except TypeError as e:
        raise ErrorConfiguracion(f"Escenario inválido: {e}")


def cargar_config(ruta):
    """Lee un escenario desde un archivo JSON."""
    try:
        with open(Path(ruta), 'r', encoding='utf-8') as f:
            documento = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ErrorConfiguracion(f"No se pudo leer el escenario {ruta}: {e}")
    return config_desde_dict(documento)


# ============================================================================
# VECTORES DE DIRECCIÓN
# ============================================================================

def desfase_desde_angulo(angulo, separacion, longitud_onda):
    """
    Desfase (ciclos) = (D/λ)·sin(ángulo).

    Raises:
        ErrorArgumentoInvalido: Si la longitud de onda no es positiva
    """
    if not longitud_onda > 0:
        raise ErrorArgumentoInvalido("La longitud de onda debe ser positiva")
    return (separacion / longitud_onda) * np.sin(angulo)


def vector_direccion(n, beta):
    """
    a_N(β): entrada n = exp(-2πi·β·n), n = 0..N-1.

    Args:
        n (int): Número de antenas
        beta (float): Desfase en ciclos

    Returns:
        numpy.ndarray: Vector complejo de longitud n
    """
    if int(n) != n or n < 1:
        raise ErrorArgumentoInvalido(f"El número de antenas debe ser ≥ 1 (recibido {n})")
    return np.exp(-2j * np.pi * beta * np.arange(int(n)))


def base_direcciones(n, fases):
    """
    Matriz A cuyas columnas son a_N(β_s), en el orden dado.

    Returns:
        BaseDirecciones
    """
    fases = np.asarray(fases, dtype=float).ravel()
    if int(n) != n or n < 1:
        raise ErrorArgumentoInvalido(f"El número de antenas debe ser ≥ 1 (recibido {n})")
    matriz = np.exp(-2j * np.pi * np.outer(np.arange(int(n)), fases))
    return BaseDirecciones(matriz=matriz, fases=fases)


# ============================================================================
# GEOMETRÍA Y RAYOS
# ============================================================================

def colocar_interferentes(lado_celda, rng=None, n_interferentes=4, fraccion=FRACCION_SEGMENTO):
    """
    Coloca interferentes en los segmentos BS principal - BS vecina.

    La BS principal está en el origen; las 4 celdas vecinas (este, norte,
    oeste, sur) tienen su BS a distancia lado_celda. El interferente ℓ usa la
    celda ℓ mod 4. Con fraccion=None la posición sobre el segmento se sortea.

    Args:
        lado_celda (float): Lado de la celda cuadrada (m)
        rng (numpy.random.Generator): Necesario solo si fraccion es None
        n_interferentes (int): Número de interferentes
        fraccion (float): Posición relativa sobre el segmento

    Returns:
        dict: posiciones (L, 2), bs_vecinas (4, 2), aoa_media (L,), distancias (L,)
    """
    if not lado_celda > 0:
        raise ErrorArgumentoInvalido("El lado de la celda debe ser positivo")
    direcciones = np.array([0.0, np.pi / 2, np.pi, -np.pi / 2])
    bs_vecinas = lado_celda * np.column_stack([np.cos(direcciones), np.sin(direcciones)])
    bs_vecinas = np.round(bs_vecinas, 12)

    celdas = np.arange(n_interferentes) % 4
    if fraccion is None:
        if rng is None:
            raise ErrorArgumentoInvalido("Se necesita un generador para sortear la posición")
        fracciones = rng.uniform(0.0, 1.0, size=n_interferentes)
    else:
        fracciones = np.full(n_interferentes, float(fraccion))

    posiciones = fracciones[:, None] * bs_vecinas[celdas]
    aoa_media = np.arctan2(posiciones[:, 1], posiciones[:, 0]) if n_interferentes else np.array([])
    # Un interferente sobre la BS principal no define dirección; se toma la del segmento
    aoa_media = np.where(fracciones > 0, aoa_media, direcciones[celdas])

    return {
        'posiciones': posiciones,
        'bs_vecinas': bs_vecinas,
        'aoa_media': aoa_media,
        'distancias': fracciones * lado_celda,
    }


def sortear_rayos(cfg, rng):
    """
    Sortea ángulos y ganancias de todos los rayos.

    AoA uniforme en [media - soporte/2, media + soporte/2], AoD uniforme en el
    intervalo de salida, v ~ CN(0, P). El orden de consumo del generador es
    fijo: medias (si hay geometría aleatoria), AoA, AoD, ganancias.

    Returns:
        ConjuntoRayos
    """
    forma = (cfg.n_interferentes, cfg.n_rayos)
    medias = cfg.medias_aoa(rng)
    aoa = rng.uniform(medias[:, None] - cfg.soporte_aoa / 2,
                      medias[:, None] + cfg.soporte_aoa / 2, size=forma)
    aod = rng.uniform(cfg.intervalo_aod[0], cfg.intervalo_aod[1], size=forma)
    potencias = cfg.matriz_potencias()
    normal = rng.standard_normal(forma) + 1j * rng.standard_normal(forma)
    ganancias = np.sqrt(potencias / 2) * normal

    return ConjuntoRayos(
        ganancias=ganancias,
        potencias=potencias,
        aoa=aoa,
        aod=aod,
        beta=desfase_desde_angulo(aoa, cfg.separacion_rx, cfg.longitud_onda),
        gamma=desfase_desde_angulo(aod, cfg.separacion_tx, cfg.longitud_onda),
    )


def sortear_canal_usuario(cfg, rng):
    """
    Canal h del usuario deseado con el mismo generador de pocos rayos
    (un transmisor de una antena, potencia unitaria por rayo).
    """
    aoa = rng.uniform(cfg.aoa_usuario - cfg.soporte_aoa / 2,
                      cfg.aoa_usuario + cfg.soporte_aoa / 2, size=cfg.n_rayos_usuario)
    ganancias = (rng.standard_normal(cfg.n_rayos_usuario)
                 + 1j * rng.standard_normal(cfg.n_rayos_usuario)) / np.sqrt(2)
    beta = desfase_desde_angulo(aoa, cfg.separacion_rx, cfg.longitud_onda)
    return base_direcciones(cfg.n_antenas, beta).matriz @ ganancias


def base_de_rayos(rayos, n_antenas):
    """A con columnas ordenadas por interferente y, dentro, por rayo."""
    return base_direcciones(n_antenas, rayos.fases_recepcion())


# ============================================================================
# CANALES Y MUESTRAS
# ============================================================================

def sintetizar_canales(rayos, cfg):
    """
    G(ℓ) = Σ_i v_{i,ℓ} a_N(β_{i,ℓ}) a_{N_I}(γ_{i,ℓ})^H.

    Returns:
        list: L matrices N×N_I
    """
    if rayos.ganancias.shape != (cfg.n_interferentes, cfg.n_rayos):
        raise ErrorDimension(
            f"Rayos con forma {rayos.ganancias.shape}, se esperaba "
            f"({cfg.n_interferentes}, {cfg.n_rayos})")
    canales = []
    for ell in range(cfg.n_interferentes):
        a_rx = base_direcciones(cfg.n_antenas, rayos.beta[ell]).matriz
        a_tx = base_direcciones(cfg.n_antenas_int, rayos.gamma[ell]).matriz
        canales.append((a_rx * rayos.ganancias[ell]) @ a_tx.conj().T)
    return canales


def _raiz_psd(matriz):
    autovalores, autovectores = np.linalg.eigh(matriz)
    return autovectores * np.sqrt(np.clip(autovalores, 0.0, None))


def sortear_simbolos(cfg, n_muestras, rng):
    """J^(ℓ)(t) ~ CN(0, R_J), forma (T, L, N_I)."""
    forma = (n_muestras, cfg.n_interferentes, cfg.n_antenas_int)
    blanco = (rng.standard_normal(forma) + 1j * rng.standard_normal(forma)) / np.sqrt(2)
    return blanco @ _raiz_psd(cfg.r_j).T


def componentes_fuente(rayos, simbolos):
    """
    x_{i,ℓ}(t) = v_{i,ℓ} a_{N_I}(γ_{i,ℓ})^H J^(ℓ)(t), forma (T, S).
    """
    n_muestras, n_int, n_antenas_int = simbolos.shape
    x = np.empty((n_muestras, n_int, rayos.n_rayos), dtype=complex)
    for ell in range(n_int):
        a_tx = base_direcciones(n_antenas_int, rayos.gamma[ell]).matriz
        x[:, ell, :] = (simbolos[:, ell, :] @ a_tx.conj()) * rayos.ganancias[ell]
    return x.reshape(n_muestras, n_int * rayos.n_rayos)


def generar_muestras(rayos, cfg, n_muestras, rng):
    """
    N(t) = Σ_ℓ G(ℓ) J^(ℓ)(t) + Z(t), t = 1..T.

    Consume el generador en orden fijo: símbolos y luego ruido.

    Returns:
        LoteMuestras: con interferencia Y, ruido Z y símbolos J
    """
    if int(n_muestras) != n_muestras or n_muestras < 1:
        raise ErrorArgumentoInvalido("T debe ser un entero ≥ 1")
    simbolos = sortear_simbolos(cfg, n_muestras, rng)
    forma = (n_muestras, cfg.n_antenas)
    ruido = np.sqrt(cfg.potencia_ruido / 2) * (rng.standard_normal(forma)
                                                + 1j * rng.standard_normal(forma))
    interferencia = np.zeros(forma, dtype=complex)
    for ell, g in enumerate(sintetizar_canales(rayos, cfg)):
        interferencia += simbolos[:, ell, :] @ g.T
    return LoteMuestras(interferencia + ruido, interferencia, ruido, simbolos)


# ============================================================================
# CORRELACIÓN VERDADERA
# ============================================================================

def covarianza_fuentes(rayos, cfg):
    """
    R_x diagonal por bloques; bloque ℓ con entradas
    v_i v_j^* a_{N_I}(γ_i)^H R_J a_{N_I}(γ_j).
    """
    n_r = rayos.n_rayos
    r_x = np.zeros((cfg.n_fuentes, cfg.n_fuentes), dtype=complex)
    for ell in range(rayos.n_interferentes):
        a_tx = base_direcciones(cfg.n_antenas_int, rayos.gamma[ell]).matriz
        v = rayos.ganancias[ell]
        bloque = np.outer(v, v.conj()) * (a_tx.conj().T @ cfg.r_j @ a_tx)
        r_x[ell * n_r:(ell + 1) * n_r, ell * n_r:(ell + 1) * n_r] = bloque
    return r_x


def covarianza_interferencia(rayos, cfg):
    """Σ_ℓ G(ℓ) R_J G(ℓ)^H, sin ruido."""
    r = np.zeros((cfg.n_antenas, cfg.n_antenas), dtype=complex)
    for g in sintetizar_canales(rayos, cfg):
        r += g @ cfg.r_j @ g.conj().T
    return r


def covarianza_verdadera(rayos, cfg, potencia_ruido=None):
    """
    R = Σ_ℓ G(ℓ) R_J G(ℓ)^H + σ² I_N.

    Args:
        potencia_ruido (float): σ² a usar; si None, la del escenario

    Returns:
        EstimacionCovarianza: con etiqueta TRUE
    """
    sigma2 = cfg.potencia_ruido if potencia_ruido is None else potencia_ruido
    r = covarianza_interferencia(rayos, cfg) + sigma2 * np.eye(cfg.n_antenas)
    return EstimacionCovarianza(r, VERDADERA, 0)


def covarianza_verdadera_factorizada(rayos, cfg, potencia_ruido=None):
    """Forma dual A R_x A^H + σ² I."""
    sigma2 = cfg.potencia_ruido if potencia_ruido is None else potencia_ruido
    a = base_de_rayos(rayos, cfg.n_antenas).matriz
    r = a @ covarianza_fuentes(rayos, cfg) @ a.conj().T + sigma2 * np.eye(cfg.n_antenas)
    return EstimacionCovarianza(r, VERDADERA, 0)


def rot_db(covarianza, potencia_ruido):
    """
    ROT = 10·log10(trace(R)/(N σ²) - 1) en dB; -inf si no hay interferencia.
    """
    if not potencia_ruido > 0:
        raise ErrorArgumentoInvalido("σ² debe ser positiva")
    matriz = covarianza.matriz if isinstance(covarianza, EstimacionCovarianza) else np.asarray(covarianza)
    razon = np.real(np.trace(matriz)) / (matriz.shape[0] * potencia_ruido) - 1.0
    if razon <= 0:
        return -np.inf
    return float(10 * np.log10(razon))


def ruido_para_rot(covarianza_int, rot):
    """
    σ² que produce el ROT pedido sin cambiar la potencia de interferencia.

    Args:
        covarianza_int (numpy.ndarray): R sin ruido
        rot (float): ROT en dB
    """
    potencia_int = np.real(np.trace(covarianza_int)) / covarianza_int.shape[0]
    if potencia_int <= 0:
        raise ErrorArgumentoInvalido("Sin potencia de interferencia no se puede fijar un ROT")
    return float(potencia_int / 10 ** (rot / 10))
