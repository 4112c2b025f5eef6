"""
Estimación sin rejilla (GAE): relajación SDP de la norma atómica y
recuperación de frecuencias por descomposición de Vandermonde.

El problema resuelto es

    min (1-η)/T Σ_t ||N(t) - Ŷ(t)||² + (η/2)(τ + trace Q)
    s.a. [[Q, Ŷ(t)], [Ŷ(t)^H, τ]] ⪰ 0  para todo t,  Q Toeplitz hermítica

con un ADMM sobre las matrices orladas W_t (actualizaciones en forma
cerrada + proyección PSD por autovalores). Opcionalmente se resuelve con
cvxpy (SCS) para validación cruzada.
"""

import logging
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import linalg, optimize

from configuracion.config import (
    ETA_DEFAULT,
    EPSILON_SDP,
    TOL_RESIDUO_SDP,
    MAX_ITER_SDP,
    RHO_SDP,
    RANK_TOL,
)
from .errores import ErrorArgumentoInvalido, ErrorConvergencia, ErrorDimension, ErrorRango
from .escenario import LoteMuestras, base_direcciones
from .tipos import EstimacionFases, GAE, envolver_fase

logger = logging.getLogger(__name__)

SOLVERS_SDP = ('admm', 'cvxpy')

# Cada cuántas iteraciones se evalúan objetivo, factibilidad y residuos
PERIODO_VERIFICACION = 10

# Límite de rank_tol al reintentar una descomposición sin subespacio de ruido
RANK_TOL_MAXIMO = 1e-2


# ============================================================================
# TIPOS
# ============================================================================

@dataclass
class ConfigSdp:
    """
    Parámetros del SDP.

    Attributes:
        eta: Peso de la dispersión, en (0, 1)
        epsilon: Cambio relativo del objetivo para declarar convergencia
        max_iter: Máximo de iteraciones
        solver: 'admm' o 'cvxpy'
        rho: Penalización inicial del ADMM
        tol_residuo: Residuo primal/dual relativo máximo
        guardar_traza: Conservar la traza de iteraciones
    """
    eta: float = ETA_DEFAULT
    epsilon: float = EPSILON_SDP
    max_iter: int = MAX_ITER_SDP
    solver: str = 'admm'
    rho: float = RHO_SDP
    tol_residuo: float = TOL_RESIDUO_SDP
    guardar_traza: bool = False

    def __post_init__(self):
        if not 0 < self.eta < 1:
            raise ErrorArgumentoInvalido(f"η debe estar en (0, 1), recibido {self.eta}")
        if not self.epsilon > 0:
            raise ErrorArgumentoInvalido("ε debe ser positivo")
        if self.max_iter < 1:
            raise ErrorArgumentoInvalido("max_iter debe ser ≥ 1")
        if self.solver not in SOLVERS_SDP:
            raise ErrorArgumentoInvalido(f"Solver '{self.solver}' no reconocido")


@dataclass
class ToeplitzPSD:
    """
    Matriz Toeplitz hermítica definida por su primera columna u.

    Q[m, n] = u[m - n] para m ≥ n y Q[n, m] = conj(u[m - n]).
    """
    primera_columna: np.ndarray
    certificada: bool = False

    def __post_init__(self):
        u = np.array(self.primera_columna, dtype=complex).ravel()
        u[0] = u[0].real
        self.primera_columna = u

    @property
    def n(self):
        return self.primera_columna.shape[0]

    @property
    def matriz(self):
        return linalg.toeplitz(self.primera_columna)

    def min_autovalor(self):
        return float(linalg.eigvalsh(self.matriz)[0])

    def es_psd(self, tol=1e-8):
        escala = max(np.linalg.norm(self.matriz), np.finfo(float).tiny)
        return self.min_autovalor() >= -tol * escala


@dataclass
class DescomposicionAtomica:
    """Q ≈ Σ_p p_p a(ζ_p) a(ζ_p)^H."""
    fases: np.ndarray
    potencias: np.ndarray
    residuo_relativo: float = 0.0

    @property
    def n_atomos(self):
        return len(self.fases)

    def reconstruir(self, n):
        a = base_direcciones(n, self.fases).matriz
        return (a * self.potencias) @ a.conj().T


@dataclass
class ResultadoSdp:
    """Solución del SDP y contadores del solver."""
    toeplitz: ToeplitzPSD
    tau: float
    estimaciones: np.ndarray
    objetivo: float
    iteraciones: int = 0
    tiempo_ms: float = 0.0
    convergio: bool = True
    residuos: dict = field(default_factory=dict)
    traza: list = field(default_factory=list)


# ============================================================================
# ESTRUCTURA TOEPLITZ
# ============================================================================

def proyectar_toeplitz(matriz):
    """
    Proyección ortogonal (Frobenius) sobre las Toeplitz hermíticas:
    promedio de cada diagonal.

    Returns:
        ToeplitzPSD: sin certificar
    """
    m = np.asarray(matriz, dtype=complex)
    n = m.shape[0]
    u = np.empty(n, dtype=complex)
    for k in range(n):
        inferior = np.mean(np.diagonal(m, offset=-k))
        superior = np.mean(np.diagonal(m, offset=k))
        u[k] = (inferior + np.conj(superior)) / 2
    return ToeplitzPSD(u)


def matrices_orladas(toeplitz, tau, estimaciones):
    """W_t = [[Q, Ŷ(t)], [Ŷ(t)^H, τ]], forma (T, N+1, N+1)."""
    q = toeplitz.matriz if isinstance(toeplitz, ToeplitzPSD) else np.asarray(toeplitz)
    n_muestras, n = estimaciones.shape
    w = np.empty((n_muestras, n + 1, n + 1), dtype=complex)
    w[:, :n, :n] = q
    w[:, :n, n] = estimaciones
    w[:, n, :n] = estimaciones.conj()
    w[:, n, n] = tau
    return w


def objetivo_sdp(muestras, estimaciones, tau, toeplitz, eta):
    """(1-η)/T Σ ||N - Ŷ||² + (η/2)(τ + trace Q)."""
    n_muestras = muestras.shape[0]
    ajuste = np.sum(np.abs(muestras - estimaciones) ** 2)
    traza = toeplitz.n * toeplitz.primera_columna[0].real
    return float((1 - eta) / n_muestras * ajuste + eta / 2 * (tau + traza))


def _proyectar_psd(matrices):
    autovalores, autovectores = np.linalg.eigh(matrices)
    autovalores = np.clip(autovalores, 0.0, None)
    return (autovectores * autovalores[:, None, :]) @ np.conj(np.swapaxes(autovectores, -1, -2))


def _restaurar_factibilidad(u, tau, estimaciones):
    """
    Suma μ = -λ_min a τ y a u0 para que todas las W_t sean PSD.

    Returns:
        tuple: (u, τ, μ)
    """
    w = matrices_orladas(ToeplitzPSD(u), tau, estimaciones)
    minimo = float(np.min(np.linalg.eigvalsh(w)))
    if minimo >= 0:
        return u, tau, 0.0
    mu = -minimo
    u = u.copy()
    u[0] += mu
    return u, tau + mu, mu


# ============================================================================
# SOLVERS
# ============================================================================

def _resolver_admm(muestras, config):
    """ADMM sobre las matrices orladas; datos ya normalizados."""
    n_muestras, n = muestras.shape
    eta = config.eta
    peso = (1 - eta) / n_muestras
    rho = config.rho

    z = np.zeros((n_muestras, n + 1, n + 1), dtype=complex)
    lam = np.zeros_like(z)
    u = np.zeros(n, dtype=complex)
    tau = 0.0
    estimaciones = np.zeros_like(muestras)

    mejor = None
    objetivo_previo = np.inf
    traza = []
    residuo_primal = residuo_dual = np.inf

    for iteracion in range(1, config.max_iter + 1):
        c = z - lam / rho

        # Ŷ(t): bloque fuera de la diagonal (aparece dos veces en ||W - C||²)
        c_y = (c[:, :n, n] + np.conj(c[:, n, :n])) / 2
        estimaciones = (peso * muestras + rho * c_y) / (peso + rho)

        tau = float(np.mean(c[:, n, n].real) - eta / (2 * rho * n_muestras))

        toeplitz = proyectar_toeplitz(np.mean(c[:, :n, :n], axis=0))
        u = toeplitz.primera_columna
        u[0] = u[0].real - eta / (2 * rho * n_muestras)

        w = matrices_orladas(ToeplitzPSD(u), tau, estimaciones)
        z_previa = z
        z = _proyectar_psd(w + lam / rho)
        lam = lam + rho * (w - z)

        if iteracion % PERIODO_VERIFICACION and iteracion != config.max_iter:
            continue

        escala_w = max(1.0, float(np.linalg.norm(w)), float(np.linalg.norm(z)))
        residuo_primal = float(np.linalg.norm(w - z)) / escala_w
        residuo_dual = rho * float(np.linalg.norm(z - z_previa)) / max(1.0, float(np.linalg.norm(lam)))

        u_fact, tau_fact, mu = _restaurar_factibilidad(u, tau, estimaciones)
        objetivo = objetivo_sdp(muestras, estimaciones, tau_fact, ToeplitzPSD(u_fact), eta)
        if mejor is None or objetivo < mejor['objetivo']:
            mejor = {'u': u_fact.copy(), 'tau': tau_fact, 'estimaciones': estimaciones.copy(),
                     'objetivo': objetivo, 'iteracion': iteracion}

        if config.guardar_traza:
            traza.append({
                'iteracion': iteracion,
                'objetivo': objetivo,
                'mejor_objetivo': mejor['objetivo'],
                'residuo_primal': residuo_primal,
                'residuo_dual': residuo_dual,
                'restauracion': mu,
                'rho': rho,
            })

        cambio = abs(objetivo - objetivo_previo) / max(abs(objetivo), 1e-300)
        objetivo_previo = objetivo
        logger.debug("ADMM it=%d obj=%.6e rp=%.2e rd=%.2e", iteracion, objetivo,
                     residuo_primal, residuo_dual)
        if (cambio < config.epsilon and residuo_primal < config.tol_residuo
                and residuo_dual < config.tol_residuo):
            return mejor, iteracion, True, traza, residuo_primal, residuo_dual

        # Balance de residuos
        if residuo_primal > 10 * residuo_dual:
            rho *= 2.0
        elif residuo_dual > 10 * residuo_primal:
            rho /= 2.0

    return mejor, config.max_iter, False, traza, residuo_primal, residuo_dual


def _resolver_cvxpy(muestras, config):
    """Mismo problema con cvxpy (SCS); solo para validación cruzada."""
    import cvxpy as cp

    n_muestras, n = muestras.shape
    eta = config.eta
    orladas = [cp.Variable((n + 1, n + 1), hermitian=True) for _ in range(n_muestras)]
    w0 = orladas[0]
    restricciones = [w >> 0 for w in orladas]
    if n > 1:
        restricciones.append(w0[1:n, 1:n] == w0[0:n - 1, 0:n - 1])
    for w in orladas[1:]:
        restricciones += [w[:n, :n] == w0[:n, :n], w[n, n] == w0[n, n]]

    ajuste = sum(cp.sum_squares(muestras[t] - orladas[t][:n, n]) for t in range(n_muestras))
    objetivo = ((1 - eta) / n_muestras * ajuste
                + eta / 2 * (cp.real(w0[n, n]) + cp.real(cp.trace(w0[:n, :n]))))
    problema = cp.Problem(cp.Minimize(objetivo), restricciones)
    tol = max(config.epsilon, 1e-9)
    problema.solve(solver=cp.SCS, eps_abs=tol, eps_rel=tol, max_iters=config.max_iter,
                   verbose=False)
    if problema.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise ErrorConvergencia(f"cvxpy terminó con estado '{problema.status}'")

    u = np.array([w0.value[k, 0] for k in range(n)], dtype=complex)
    tau = float(np.real(w0.value[n, n]))
    estimaciones = np.array([w.value[:n, n] for w in orladas])
    u, tau, _ = _restaurar_factibilidad(u, tau, estimaciones)
    mejor = {'u': u, 'tau': tau, 'estimaciones': estimaciones,
             'objetivo': objetivo_sdp(muestras, estimaciones, tau, ToeplitzPSD(u), eta)}
    iteraciones = int(problema.solver_stats.num_iters or 0)
    return mejor, iteraciones, True, [], 0.0, 0.0


def resolver_sdp(lote, config=None):
    """
    Resuelve el SDP de norma atómica para un lote de T vectores.

    Los datos se normalizan por su valor RMS s; se devuelve Ŷ·s, Q·s² y τ
    sin escalar (las restricciones orladas se mantienen). El objetivo
    reportado corresponde al problema normalizado.

    Args:
        lote (LoteMuestras o array (T, N)): Vectores N(t)
        config (ConfigSdp): Parámetros; por defecto ConfigSdp()

    Returns:
        ResultadoSdp

    Raises:
        ErrorConvergencia: Si no converge en max_iter (lleva el mejor iterado)
    """
    config = config or ConfigSdp()
    muestras = lote.muestras if isinstance(lote, LoteMuestras) else np.atleast_2d(
        np.asarray(lote, dtype=complex))
    if muestras.shape[0] < 1 or muestras.shape[1] < 1:
        raise ErrorDimension("El lote debe tener T ≥ 1 vectores de longitud N ≥ 1")
    n_muestras, n = muestras.shape

    inicio = time.perf_counter()
    escala = float(np.sqrt(np.mean(np.abs(muestras) ** 2)))
    if escala == 0.0:
        return ResultadoSdp(ToeplitzPSD(np.zeros(n), certificada=True), 0.0,
                            np.zeros_like(muestras), 0.0)

    normalizadas = muestras / escala
    if config.solver == 'cvxpy':
        mejor, iteraciones, convergio, traza, rp, rd = _resolver_cvxpy(normalizadas, config)
    else:
        mejor, iteraciones, convergio, traza, rp, rd = _resolver_admm(normalizadas, config)
    tiempo_ms = (time.perf_counter() - inicio) * 1e3

    toeplitz = ToeplitzPSD(mejor['u'] * escala ** 2)
    toeplitz.certificada = toeplitz.es_psd()
    resultado = ResultadoSdp(
        toeplitz=toeplitz,
        tau=mejor['tau'],
        estimaciones=mejor['estimaciones'] * escala,
        objetivo=mejor['objetivo'],
        iteraciones=iteraciones,
        tiempo_ms=tiempo_ms,
        convergio=convergio,
        residuos={'primal': rp, 'dual': rd},
        traza=traza,
    )
    if not convergio:
        raise ErrorConvergencia(
            f"El SDP no convergió en {iteraciones} iteraciones "
            f"(residuo primal {rp:.2e}, dual {rd:.2e})",
            mejor_iterado=resultado, residuos=resultado.residuos)
    return resultado


def exportar_traza(resultado, ruta):
    """
    Guarda la traza del solver (iteración, objetivo, residuos) en CSV.

    Returns:
        Path: Ruta escrita
    """
    ruta = Path(ruta)
    columnas = ['iteracion', 'objetivo', 'mejor_objetivo', 'residuo_primal',
                'residuo_dual', 'restauracion', 'rho']
    pd.DataFrame(resultado.traza, columns=columnas).to_csv(ruta, index=False, float_format='%.17g')
    return ruta


# ============================================================================
# DESCOMPOSICIÓN DE VANDERMONDE
# ============================================================================

def descomposicion_vandermonde(toeplitz, rank_tol=RANK_TOL, rango=None):
    """
    Descompone una Toeplitz PSD en átomos a(ζ)a(ζ)^H con potencias ≥ 0.

    1. Rango numérico r = #{λ ≥ rank_tol·λ_max} (o `rango` si se fuerza)
    2. Frecuencias por invariancia al desplazamiento (ESPRIT) sobre los r
       autovectores dominantes
    3. Potencias por mínimos cuadrados no negativos

    Args:
        toeplitz (ToeplitzPSD o array): Matriz Q
        rank_tol (float): Umbral relativo de rango
        rango (int): Rango impuesto (omite el umbral)

    Returns:
        DescomposicionAtomica

    Raises:
        ErrorRango: Si r = N (sin subespacio de ruido)
    """
    q = toeplitz.matriz if isinstance(toeplitz, ToeplitzPSD) else np.asarray(toeplitz, dtype=complex)
    n = q.shape[0]
    autovalores, autovectores = linalg.eigh((q + q.conj().T) / 2)
    autovalores, autovectores = autovalores[::-1], autovectores[:, ::-1]

    lambda_max = autovalores[0] if n else 0.0
    if lambda_max <= 0:
        return DescomposicionAtomica(np.array([]), np.array([]))

    if rango is None:
        r = int(np.sum(autovalores >= rank_tol * lambda_max))
        if r >= n:
            raise ErrorRango(f"Q tiene rango completo ({n}) con rank_tol={rank_tol:g}; "
                             "pruebe un rank_tol mayor")
    else:
        r = int(min(rango, n - 1))
    logger.debug("Vandermonde: rango %d de %d", r, n)

    senal = autovectores[:, :r]
    psi = np.linalg.pinv(senal[:-1]) @ senal[1:]
    raices = np.linalg.eigvals(psi)
    fases = envolver_fase(-np.angle(raices) / (2 * np.pi))

    potencias = _potencias_nnls(q, fases)
    a = base_direcciones(n, fases).matriz
    residuo = np.linalg.norm(q - (a * potencias) @ a.conj().T) / np.linalg.norm(q)
    orden = np.argsort(fases)
    return DescomposicionAtomica(fases[orden], potencias[orden], float(residuo))


def _potencias_nnls(q, fases):
    """Ajuste no negativo de Σ p a a^H a la primera columna de Q."""
    n = q.shape[0]
    # Por ser Toeplitz basta con la primera columna: u_k = Σ p exp(-2πi ζ k)
    a = base_direcciones(n, fases).matriz
    sistema = np.vstack([a.real, a.imag])
    objetivo = np.concatenate([q[:, 0].real, q[:, 0].imag])
    potencias, _ = optimize.nnls(sistema, objetivo)
    return potencias


# ============================================================================
# GAE
# ============================================================================

def _descomponer_con_reintento(toeplitz, n_fuentes, rank_tol):
    """Sube rank_tol ante rango completo; como último recurso fuerza r = S."""
    tol = rank_tol
    while True:
        try:
            return descomposicion_vandermonde(toeplitz, tol), tol
        except ErrorRango:
            if tol >= RANK_TOL_MAXIMO:
                break
            tol = min(tol * 10, RANK_TOL_MAXIMO)
    logger.warning("Rango de Q sin subespacio de ruido; se fuerza r = %d", n_fuentes)
    return descomposicion_vandermonde(toeplitz, tol, rango=n_fuentes), tol


def estimacion_gae(lote, config=None, n_fuentes=0, rank_tol=RANK_TOL):
    """
    GAE: resuelve el SDP y toma las S frecuencias de mayor potencia.

    Args:
        lote (LoteMuestras o array (T, N)): Muestras
        config (ConfigSdp): Parámetros del SDP
        n_fuentes (int): S
        rank_tol (float): Umbral relativo de rango

    Returns:
        EstimacionFases: con diagnósticos del solver

    Raises:
        ErrorRango: Si ni con rank_tol/10 se obtienen S átomos
    """
    muestras = lote.muestras if isinstance(lote, LoteMuestras) else np.atleast_2d(
        np.asarray(lote, dtype=complex))
    n = muestras.shape[1]
    if n_fuentes < 0 or n_fuentes > n - 1:
        raise ErrorArgumentoInvalido(f"S debe estar en [0, N-1], recibido {n_fuentes}")
    if n_fuentes == 0:
        return EstimacionFases(np.array([]), GAE, {'n_atomos': 0})

    try:
        resultado = resolver_sdp(muestras, config)
    except ErrorConvergencia as e:
        if e.mejor_iterado is None:
            raise
        mensaje = f"GAE usa el mejor iterado tras no converger: {e}"
        logger.warning(mensaje)
        warnings.warn(mensaje, RuntimeWarning)
        resultado = e.mejor_iterado

    descomposicion, tol = _descomponer_con_reintento(resultado.toeplitz, n_fuentes, rank_tol)
    if descomposicion.n_atomos < n_fuentes:
        tol = rank_tol / 10
        try:
            descomposicion = descomposicion_vandermonde(resultado.toeplitz, tol)
        except ErrorRango:
            descomposicion = descomposicion_vandermonde(resultado.toeplitz, tol, rango=n_fuentes)
    if descomposicion.n_atomos < n_fuentes:
        raise ErrorRango(f"Solo se recuperaron {descomposicion.n_atomos} átomos de {n_fuentes}")

    # Se conservan los S átomos de mayor potencia
    elegidos = np.sort(np.argsort(-descomposicion.potencias, kind='stable')[:n_fuentes])
    diagnosticos = {
        'n_atomos': descomposicion.n_atomos,
        'seleccion': 'mayor_potencia',
        'rank_tol': tol,
        'residuo_vandermonde': descomposicion.residuo_relativo,
        'iteraciones': resultado.iteraciones,
        'tiempo_ms': resultado.tiempo_ms,
        'convergio': resultado.convergio,
        'objetivo': resultado.objetivo,
    }
    return EstimacionFases(descomposicion.fases[elegidos], GAE, diagnosticos)
