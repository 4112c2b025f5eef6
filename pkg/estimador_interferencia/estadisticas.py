"""
Módulo de estadísticas de Monte-Carlo: medias con suma compensada,
errores estándar y agregación de ensayos.
"""

import math

import numpy as np
import pandas as pd

from .errores import ErrorEsquema


# ============================================================================
# ESTADÍSTICAS BÁSICAS
# ============================================================================

def _validos(datos):
    datos = np.asarray(datos, dtype=float).ravel()
    return datos[np.isfinite(datos)]


def media_compensada(datos):
    """Media con math.fsum: no depende del orden de los sumandos."""
    datos_validos = _validos(datos)
    if len(datos_validos) == 0:
        return math.nan
    return math.fsum(datos_validos) / len(datos_validos)


def error_estandar(datos):
    """s/√n con la desviación muestral (ddof=1); 0 si n = 1."""
    datos_validos = _validos(datos)
    n = len(datos_validos)
    if n == 0:
        return math.nan
    if n == 1:
        return 0.0
    media = math.fsum(datos_validos) / n
    varianza = math.fsum((datos_validos - media) ** 2) / (n - 1)
    return math.sqrt(varianza / n)


def calcular_estadisticas_basicas(datos):
    """
    Estadísticas descriptivas de una métrica por ensayo.

    Args:
        datos (numpy.ndarray): Valores por ensayo (se ignoran NaN e inf)

    Returns:
        dict: n, media, ee, std, min, max
    """
    datos_validos = _validos(datos)

    if len(datos_validos) == 0:
        return {
            'n': 0,
            'media': None,
            'ee': None,
            'std': None,
            'min': None,
            'max': None,
        }

    return {
        'n': len(datos_validos),
        'media': media_compensada(datos_validos),
        'ee': error_estandar(datos_validos),
        'std': float(np.std(datos_validos, ddof=1)) if len(datos_validos) > 1 else 0.0,
        'min': float(np.min(datos_validos)),
        'max': float(np.max(datos_validos)),
    }


def diferencia_significativa(media_1, ee_1, media_2, ee_2, k=2.0):
    """True si |m1 - m2| supera k errores estándar combinados."""
    return abs(media_1 - media_2) > k * math.hypot(ee_1, ee_2)


# ============================================================================
# AGREGACIÓN DE ENSAYOS
# ============================================================================

def agregar_ensayos(df, claves, metricas):
    """
    Medias y errores estándar por grupo, en orden determinista.

    Args:
        df (pandas.DataFrame): Una fila por ensayo
        claves (list): Columnas de agrupación
        metricas (list): Columnas a resumir

    Returns:
        pandas.DataFrame: claves + n + <metrica> + <metrica>_ee

    Raises:
        ErrorEsquema: Si faltan columnas
    """
    faltantes = [c for c in list(claves) + list(metricas) if c not in df.columns]
    if faltantes:
        raise ErrorEsquema(f"Faltan columnas: {', '.join(faltantes)}")

    filas = []
    for valores_clave, grupo in df.groupby(list(claves), sort=True):
        if not isinstance(valores_clave, tuple):
            valores_clave = (valores_clave,)
        fila = dict(zip(claves, valores_clave))
        fila['n'] = len(grupo)
        for metrica in metricas:
            fila[metrica] = media_compensada(grupo[metrica].to_numpy())
            fila[f'{metrica}_ee'] = error_estandar(grupo[metrica].to_numpy())
        filas.append(fila)

    columnas = list(claves) + ['n'] + [c for m in metricas for c in (m, f'{m}_ee')]
    return pd.DataFrame(filas, columns=columnas)


if __name__ == "__main__":
    print("=" * 80)
    print("MÓDULO ESTADÍSTICAS - PRUEBA")
    print("=" * 80)

    rng = np.random.default_rng(42)
    datos_test = rng.normal(0.6, 0.15, 1000)

    print("\nEstadísticas básicas:")
    for clave, valor in calcular_estadisticas_basicas(datos_test).items():
        print(f"  {clave}: {valor}")
