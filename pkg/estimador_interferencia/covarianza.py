"""
Módulo de estimación de la matriz de correlación de interferencia.

Incluye:
- Estimación LS (covarianza muestral)
- Eliminación de ruido y simetría hermítica
- Reconstrucción PBCE por proyección en el subespacio de direcciones
- MSE empírico y expresiones cerradas Γ_LS y Γ_PBCE
- Oráculo de varianza del producto de gaussianas complejas correlacionadas
"""

import logging
import warnings

import numpy as np
from scipy import linalg

from configuracion.config import TOL_DUPLICADOS, PERTURBACION_DUPLICADOS
from .errores import ErrorArgumentoInvalido, ErrorDimension, ErrorRango
from .escenario import base_direcciones, BaseDirecciones, LoteMuestras
from .tipos import EstimacionCovarianza, EstimacionFases, LS, PBCE_ID, VERDADERA, envolver_fase

logger = logging.getLogger(__name__)

# Etiqueta de covarianza PBCE según el estimador de fases usado
ETIQUETA_PBCE = {
    'GAE': 'PBCE-GAE',
    'SGE': 'PBCE-SGE',
    'GEC': 'PBCE-GEC',
    'MUSIC': 'PBCE-MUSIC',
    'ID': PBCE_ID,
}


def _como_matriz(estimacion):
    if isinstance(estimacion, EstimacionCovarianza):
        return estimacion.matriz
    return np.asarray(estimacion, dtype=complex)


# ============================================================================
# ÁLGEBRA AUXILIAR
# ============================================================================

def pseudoinversa(matriz):
    """
    Pseudoinversa de Moore-Penrose por SVD delgada.

    Corte de valores singulares: max(dim)·ε_máquina·σ_max.

    Returns:
        tuple: (pseudoinversa, rango numérico)
    """
    matriz = np.asarray(matriz, dtype=complex)
    if matriz.size == 0:
        return np.zeros(matriz.shape[::-1], dtype=complex), 0
    u, s, vh = linalg.svd(matriz, full_matrices=False)
    corte = max(matriz.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    mascara = s > corte
    s_inv = np.zeros_like(s)
    s_inv[mascara] = 1.0 / s[mascara]
    return (vh.conj().T * s_inv) @ u.conj().T, int(np.sum(mascara))


def proyector_columnas(matriz):
    """
    Proyector ortogonal U_r U_r^H sobre el espacio columna, con la misma SVD
    delgada y el mismo corte que `pseudoinversa`.

    Es hermítico e idempotente aunque la matriz esté mal condicionada, cosa
    que no garantiza el producto A A†.

    Returns:
        tuple: (proyector (m, m), rango numérico)
    """
    matriz = np.asarray(matriz, dtype=complex)
    if matriz.size == 0:
        return np.zeros((matriz.shape[0], matriz.shape[0]), dtype=complex), 0
    u, s, _ = linalg.svd(matriz, full_matrices=False)
    corte = max(matriz.shape) * np.finfo(float).eps * s[0]
    u_r = u[:, s > corte]
    return u_r @ u_r.conj().T, u_r.shape[1]


def separar_duplicados(fases, tol=TOL_DUPLICADOS, perturbacion=PERTURBACION_DUPLICADOS):
    """
    Separa desfases que coinciden (distancia circular < tol).

    Las fases se recorren en orden circular empezando tras el mayor hueco,
    así -1/2 y 1/2 quedan contiguas. En cada racha de valores originales a
    menos de `tol` del anterior, la k-ésima repetición pasa a
    ancla + k·perturbacion, donde ancla es el primer valor de la racha.

    Returns:
        tuple: (fases corregidas, número de fases perturbadas)
    """
    fases = np.array(fases, dtype=float)
    if fases.size < 2:
        return fases, 0
    orden = np.argsort(fases, kind='stable')
    ordenadas = fases[orden]
    huecos = np.append(np.diff(ordenadas), ordenadas[0] + 1.0 - ordenadas[-1])
    inicio = (int(np.argmax(huecos)) + 1) % fases.size
    orden = np.roll(orden, -inicio)
    desenvueltas = np.roll(ordenadas, -inicio)
    desenvueltas[fases.size - inicio:] += 1.0

    n_perturbadas = 0
    ancla, repeticion = desenvueltas[0], 0
    for k in range(1, fases.size):
        if desenvueltas[k] - desenvueltas[k - 1] < tol:
            repeticion += 1
            fases[orden[k]] = envolver_fase(ancla + repeticion * perturbacion)
            n_perturbadas += 1
        else:
            ancla, repeticion = desenvueltas[k], 0
    return fases, n_perturbadas


# ============================================================================
# ESTIMADOR LS
# ============================================================================

def estimacion_ls(lote):
    """
    R̂_LS = (1/T) Σ_t N(t) N(t)^H.

    Args:
        lote (LoteMuestras o array (T, N)): Muestras recibidas

    Returns:
        EstimacionCovarianza: etiqueta LS
    """
    muestras = lote.muestras if isinstance(lote, LoteMuestras) else np.atleast_2d(
        np.asarray(lote, dtype=complex))
    if muestras.size == 0 or muestras.shape[0] < 1:
        raise ErrorArgumentoInvalido("El lote de muestras está vacío")
    n_muestras = muestras.shape[0]
    r = muestras.T @ muestras.conj() / n_muestras
    # Hermítica por construcción; se elimina el residuo de redondeo
    r = (r + r.conj().T) / 2
    return EstimacionCovarianza(r, LS, n_muestras)


def eliminar_ruido(estimacion, potencia_ruido):
    """
    R̂' = R̂ - σ² I. El resultado puede ser indefinido.
    """
    if potencia_ruido < 0:
        raise ErrorArgumentoInvalido("σ² no puede ser negativa")
    matriz = _como_matriz(estimacion)
    resultado = matriz - potencia_ruido * np.eye(matriz.shape[0])
    if isinstance(estimacion, EstimacionCovarianza):
        return estimacion.con_matriz(resultado)
    return EstimacionCovarianza(resultado, LS)


def hermitizar(estimacion):
    """(M + M^H) / 2."""
    matriz = _como_matriz(estimacion)
    resultado = (matriz + matriz.conj().T) / 2
    if isinstance(estimacion, EstimacionCovarianza):
        return estimacion.con_matriz(resultado)
    return EstimacionCovarianza(resultado, LS)


def recortar_psd(estimacion):
    """Piso de autovalores en 0 (opcional, para consumidores que exigen PSD)."""
    matriz = _como_matriz(hermitizar(estimacion))
    autovalores, autovectores = linalg.eigh(matriz)
    resultado = (autovectores * np.clip(autovalores, 0.0, None)) @ autovectores.conj().T
    return hermitizar(estimacion).con_matriz(resultado) if isinstance(
        estimacion, EstimacionCovarianza) else EstimacionCovarianza(resultado, LS)


# ============================================================================
# PBCE
# ============================================================================

def _base_estimada(fases, n_antenas):
    fases_array = fases.valores if isinstance(fases, EstimacionFases) else np.asarray(fases, dtype=float)
    fases_array, n_perturbadas = separar_duplicados(fases_array)
    if n_perturbadas:
        mensaje = (f"{n_perturbadas} desfases duplicados perturbados en "
                   f"{PERTURBACION_DUPLICADOS} ciclos")
        logger.warning(mensaje)
        warnings.warn(mensaje, RuntimeWarning)
    return base_direcciones(n_antenas, fases_array), n_perturbadas


def covarianza_interna(ls, base, potencia_ruido):
    """
    R̂_x = Â† (R̂_LS - σ² I) (Â†)^H.
    """
    a_pinv, _ = pseudoinversa(base.matriz)
    r_sin_ruido = _como_matriz(eliminar_ruido(ls, potencia_ruido))
    return a_pinv @ r_sin_ruido @ a_pinv.conj().T


def reconstruccion_pbce(ls, fases, potencia_ruido):
    """
    Estimación PBCE: proyecta R̂_LS en el subespacio de Â y reconstruye.

    Pasos: Â a partir de β̂; R̂_x = Â†(R̂_LS - σ²I)(Â†)^H;
    R̂_PBCE = Â R̂_x Â^H + σ² I.

    Se evalúa como P (R̂_LS - σ²I) P + σ² I con P = U_r U_r^H, el proyector
    ortogonal sobre las columnas de Â. Es la misma matriz, pero no pierde
    precisión cuando dos desfases están casi juntos y Â está mal condicionada.

    Args:
        ls (EstimacionCovarianza): Estimación LS
        fases (EstimacionFases o array): S desfases estimados
        potencia_ruido (float): σ² conocida

    Returns:
        EstimacionCovarianza: etiqueta PBCE-<método de fases>
    """
    matriz_ls = _como_matriz(ls)
    n_antenas = matriz_ls.shape[0]
    n_fuentes = len(fases)
    if n_fuentes > n_antenas:
        raise ErrorDimension(f"S = {n_fuentes} supera N = {n_antenas}")

    base, _ = _base_estimada(fases, n_antenas)
    proyector, _ = proyector_columnas(base.matriz)
    r_sin_ruido = _como_matriz(eliminar_ruido(matriz_ls, potencia_ruido))
    r = proyector @ r_sin_ruido @ proyector + potencia_ruido * np.eye(n_antenas)
    r = (r + r.conj().T) / 2

    metodo_fases = fases.metodo if isinstance(fases, EstimacionFases) else 'ID'
    n_muestras = ls.n_muestras if isinstance(ls, EstimacionCovarianza) else 0
    return EstimacionCovarianza(r, ETIQUETA_PBCE[metodo_fases], n_muestras)


def reconstruccion_pbce_directa(ls, fases, potencia_ruido):
    """
    Forma en una sola expresión:
    Â[Â† R̂_LS Â†^H - σ² Â† Â†^H] Â^H + σ² I = P R̂_LS P - σ² P + σ² I,
    con P = Â Â† evaluado como proyector ortogonal.
    """
    matriz_ls = _como_matriz(ls)
    n_antenas = matriz_ls.shape[0]
    base, _ = _base_estimada(fases, n_antenas)
    proyector, _ = proyector_columnas(base.matriz)
    return (proyector @ matriz_ls @ proyector - potencia_ruido * proyector
            + potencia_ruido * np.eye(n_antenas))


# ============================================================================
# MSE Y EXPRESIONES CERRADAS
# ============================================================================

def error_cuadratico(estimacion, verdadera):
    """
    (1/N²) Σ_{m,n} |R̂ - R|²_{n,m} de un solo ensayo.

    La esperanza se obtiene promediando ensayos en el experimento.
    """
    a = _como_matriz(estimacion)
    b = _como_matriz(verdadera)
    if a.shape != b.shape:
        raise ErrorDimension(f"Dimensiones distintas: {a.shape} vs {b.shape}")
    return float(np.sum(np.abs(a - b) ** 2) / a.shape[0] ** 2)


def gamma_ls(verdadera, n_muestras):
    """Γ_LS = trace²(R) / (T N²)."""
    if n_muestras < 1:
        raise ErrorArgumentoInvalido("T debe ser ≥ 1")
    r = _como_matriz(verdadera)
    return float(np.real(np.trace(r)) ** 2 / (n_muestras * r.shape[0] ** 2))


def gamma_pbce(verdadera, base, potencia_ruido, n_muestras, forma='proyectada'):
    """
    MSE de PBCE con desfases correctos.

    forma='proyectada': trace²(P R P) / (T N²), con P = A A†, que coincide con
    trace²[R - σ²(I - P)] / (T N²) cuando R = A R_x A^H + σ² I.
    forma='literal': trace²[R - σ²(I - A A† R A†^H A^H)] / (T N²), la
    expresión simplificada alternativa (con R dentro de la corrección).

    La forma por defecto es la proyectada, que es la que sigue al MSE de
    Monte-Carlo; la literal se obtiene con forma='literal' y la batería
    mse-analysis reporta ambas.

    Raises:
        ErrorRango: Si A no tiene rango columna completo
    """
    if n_muestras < 1:
        raise ErrorArgumentoInvalido("T debe ser ≥ 1")
    r = _como_matriz(verdadera)
    a = base.matriz if isinstance(base, BaseDirecciones) else np.asarray(base, dtype=complex)
    n_antenas = r.shape[0]
    proyector, rango = proyector_columnas(a)
    if rango < a.shape[1]:
        raise ErrorRango(f"A tiene rango {rango} < S = {a.shape[1]}")
    proyectada = proyector @ r @ proyector

    if forma == 'proyectada':
        traza = np.real(np.trace(proyectada))
    elif forma == 'literal':
        traza = np.real(np.trace(r - potencia_ruido * (np.eye(n_antenas) - proyectada)))
    else:
        raise ErrorArgumentoInvalido(f"Forma '{forma}' no reconocida")
    return float(traza ** 2 / (n_muestras * n_antenas ** 2))


# ============================================================================
# VARIANZA DEL PRODUCTO
# ============================================================================

def oraculo_varianza_producto(var_x, var_y, xi, n_sorteos, rng):
    """
    Varianza de x·y* para x, y ~ CN correlacionadas con coeficiente ξ.

    Analítica: σx² σy² (independiente de ξ). Empírica: n_sorteos pares.

    Args:
        var_x, var_y (float): Varianzas
        xi (complex): Coeficiente de correlación E[x y*]/(σx σy), |ξ| ≤ 1
        n_sorteos (int): Número de pares
        rng (numpy.random.Generator): Generador

    Returns:
        tuple: (analítica, empírica)
    """
    if abs(xi) > 1 + 1e-12:
        raise ErrorArgumentoInvalido(f"|ξ| = {abs(xi):.4f} > 1")
    forma = (2, n_sorteos)
    w = (rng.standard_normal(forma) + 1j * rng.standard_normal(forma)) / np.sqrt(2)
    sx, sy = np.sqrt(var_x), np.sqrt(var_y)
    x = sx * w[0]
    # y con E[x y*] = ξ σx σy
    y = sy * (np.conj(xi) * w[0] + np.sqrt(max(0.0, 1 - abs(xi) ** 2)) * w[1])
    producto = x * np.conj(y)
    empirica = float(np.mean(np.abs(producto - np.mean(producto)) ** 2))
    return float(var_x * var_y), empirica
