"""
Métricas de enlace con blanqueo: tasa alcanzable verdadera C, tasa
estimada Ĉ, throughput ρ y elección de δ.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from configuracion.config import PASO_DELTA
from .errores import ErrorArgumentoInvalido, ErrorNoDefinida
from .tipos import EstimacionCovarianza

logger = logging.getLogger(__name__)

# Holgura relativa al comparar δĈ con C (evita cortes espurios por redondeo)
TOL_CORTE = 1e-12


@dataclass
class EnlaceRealizacion:
    """
    Attributes:
        canal: h (N,)
        potencia_simbolo: σ_x²
        estimada: R̂
        verdadera: R
    """
    canal: np.ndarray
    potencia_simbolo: float
    estimada: object
    verdadera: object


@dataclass
class ReporteTasa:
    """Tasas en bits/s/Hz de un enlace."""
    c: float
    c_est: float
    c_opt: float
    delta: float
    rho: float
    corte: bool


def _matriz(estimacion):
    if isinstance(estimacion, EstimacionCovarianza):
        return estimacion.matriz
    return np.asarray(estimacion, dtype=complex)


def blanqueo(estimada):
    """
    W = Λ^{-1/2} U^H, de modo que W R̂ W^H = I.

    Raises:
        ErrorNoDefinida: Si R̂ no es definida positiva (lleva los autovalores ≤ 0)
    """
    matriz = _matriz(estimada)
    autovalores, autovectores = linalg.eigh((matriz + matriz.conj().T) / 2)
    no_positivos = autovalores[autovalores <= 0]
    if no_positivos.size:
        raise ErrorNoDefinida(
            f"La matriz a blanquear no es definida positiva: {no_positivos.size} autovalores ≤ 0",
            autovalores=no_positivos)
    return autovectores.conj().T / np.sqrt(autovalores)[:, None]


def aplicar_piso_ruido(estimada, potencia_ruido):
    """
    Lleva los autovalores de R̂ por debajo de σ² hasta σ².

    R ⪰ σ²I siempre; con T < N la estimación LS (o PBCE con T < S) es
    singular y no se puede blanquear sin este piso.
    """
    matriz = _matriz(estimada)
    autovalores, autovectores = linalg.eigh((matriz + matriz.conj().T) / 2)
    if autovalores[0] >= potencia_ruido:
        return estimada
    piso = np.maximum(autovalores, potencia_ruido)
    resultado = (autovectores * piso) @ autovectores.conj().T
    if isinstance(estimada, EstimacionCovarianza):
        return estimada.con_matriz(resultado)
    return resultado


def _tasas(canal, potencia_simbolo, estimada, verdadera):
    w = blanqueo(estimada)
    g = w @ canal
    r_residual = w @ _matriz(verdadera) @ w.conj().T
    ganancia = float(np.real(np.vdot(g, g)))
    residual = float(np.real(np.vdot(g, r_residual @ g)))
    if residual <= 0:
        c = 0.0 if ganancia == 0 else math.inf
    else:
        c = math.log2(1 + ganancia ** 2 * potencia_simbolo / residual)
    c_est = math.log2(1 + ganancia * potencia_simbolo)
    return c, c_est


def throughput(delta, c, c_est):
    """ρ = δĈ si δĈ ≤ C, 0 en caso contrario (array o escalar)."""
    pedida = delta * np.asarray(c_est, dtype=float)
    c = np.asarray(c, dtype=float)
    return np.where(pedida <= c + TOL_CORTE * np.maximum(np.abs(c), 1.0), pedida, 0.0)


def reporte_tasa(enlace, delta):
    """
    C, Ĉ, C_opt y ρ de un enlace con MRC tras el blanqueo.

    Args:
        enlace (EnlaceRealizacion): Canal, potencia y correlaciones
        delta (float): Fracción de Ĉ solicitada, en [0, 1]

    Returns:
        ReporteTasa
    """
    if not 0 <= delta <= 1:
        raise ErrorArgumentoInvalido(f"δ debe estar en [0, 1], recibido {delta}")
    if enlace.potencia_simbolo <= 0:
        raise ErrorArgumentoInvalido("σ_x² debe ser positiva")
    c, c_est = _tasas(enlace.canal, enlace.potencia_simbolo, enlace.estimada, enlace.verdadera)
    c_opt, _ = _tasas(enlace.canal, enlace.potencia_simbolo, enlace.verdadera, enlace.verdadera)
    rho = float(throughput(delta, c, c_est))
    return ReporteTasa(c=c, c_est=c_est, c_opt=c_opt, delta=float(delta), rho=rho,
                       corte=bool(delta * c_est > 0 and rho == 0.0))


def rejilla_delta(paso=PASO_DELTA):
    """{0, paso, ..., 1}."""
    if not 0 < paso <= 1:
        raise ErrorArgumentoInvalido("El paso de δ debe estar en (0, 1]")
    n_pasos = int(round(1 / paso))
    return np.linspace(0.0, 1.0, n_pasos + 1)


def curva_throughput(c, c_est, rejilla):
    """E[ρ] para cada δ de la rejilla (suma compensada)."""
    c = np.asarray(c, dtype=float)
    c_est = np.asarray(c_est, dtype=float)
    return np.array([math.fsum(throughput(d, c, c_est)) / len(c) for d in rejilla])


def optimizar_delta(c, c_est, paso=PASO_DELTA):
    """
    δ* = argmax_δ E[ρ] sobre la rejilla; empates hacia el δ menor.

    Args:
        c, c_est (array): Tasas verdadera y estimada de cada ensayo
        paso (float): Paso de la rejilla

    Returns:
        tuple: (δ*, E[ρ] en δ*)
    """
    c = np.asarray(c, dtype=float)
    if c.size == 0:
        raise ErrorArgumentoInvalido("El ensamble está vacío")
    rejilla = rejilla_delta(paso)
    curva = curva_throughput(c, c_est, rejilla)
    k = int(np.argmax(curva))
    return float(rejilla[k]), float(curva[k])
