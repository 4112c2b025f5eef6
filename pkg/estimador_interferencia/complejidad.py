"""
Modelo de número de operaciones aritméticas de cada estimador de desfases
(orden asintótico, sin constantes).
"""

import numpy as np
import pandas as pd

from configuracion.config import EPSILON_SDP, N_REJILLA_MUSIC, T0_DEFAULT
from .errores import ErrorArgumentoInvalido


def operaciones_sdp(n, n_muestras, epsilon=EPSILON_SDP):
    """Resolver el SDP con T vectores: T(N³ + T N² + T²) √N log(1/ε)."""
    t = float(n_muestras)
    return t * (n ** 3 + t * n ** 2 + t ** 2) * np.sqrt(n) * np.log(1 / epsilon)


def operaciones_estimador(metodo, n, n_muestras, n_fuentes, tamano_ventana=T0_DEFAULT,
                          n_rejilla=N_REJILLA_MUSIC, epsilon=EPSILON_SDP):
    """
    Operaciones de un estimador de desfases.

    Args:
        metodo (str): 'LS', 'GAE', 'SGE', 'GEC' o 'MUSIC' (admite prefijo 'PBCE-')
        n (int): N
        n_muestras (int): T
        n_fuentes (int): S
        tamano_ventana (int): T0 (GEC)
        n_rejilla (int): N_G (MUSIC)
        epsilon (float): Precisión del SDP

    Returns:
        float: Número de operaciones
    """
    metodo = metodo.replace('PBCE-', '')
    if metodo == 'LS':
        return float(n_muestras * n ** 2)
    if metodo == 'GAE':
        return float(operaciones_sdp(n, n_muestras, epsilon))
    if metodo == 'SGE':
        return float(n ** 3 + operaciones_sdp(n, n_fuentes, epsilon))
    if metodo == 'GEC':
        return float(n_muestras ** 1.7 + operaciones_sdp(n, tamano_ventana, epsilon))
    if metodo == 'MUSIC':
        return float(n ** 2 * (n_fuentes + n_muestras + n_rejilla))
    if metodo == 'ID':
        return 0.0
    raise ErrorArgumentoInvalido(f"Método '{metodo}' sin modelo de complejidad")


def tabla_complejidad(n, valores_t, n_fuentes, metodos=('LS', 'GAE', 'SGE', 'GEC', 'MUSIC'),
                      tamano_ventana=T0_DEFAULT, n_rejilla=N_REJILLA_MUSIC, epsilon=EPSILON_SDP):
    """
    Operaciones de cada método para una lista de T.

    Returns:
        pandas.DataFrame: columnas estimador, T, operaciones
    """
    filas = [
        {'estimador': metodo, 'T': int(t),
         'operaciones': operaciones_estimador(metodo, n, t, n_fuentes, tamano_ventana,
                                              n_rejilla, epsilon)}
        for metodo in metodos for t in sorted(valores_t)
    ]
    return pd.DataFrame(filas, columns=['estimador', 'T', 'operaciones'])
