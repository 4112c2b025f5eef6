"""
Tipos de datos compartidos entre módulos: estimaciones de covarianza y de
desfases de recepción.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .errores import ErrorArgumentoInvalido, ErrorDimension

# Etiquetas de procedencia de una matriz de covarianza
VERDADERA = "TRUE"
LS = "LS"
PBCE_GAE = "PBCE-GAE"
PBCE_SGE = "PBCE-SGE"
PBCE_GEC = "PBCE-GEC"
PBCE_MUSIC = "PBCE-MUSIC"
PBCE_ID = "PBCE-ID"
METODOS_COVARIANZA = (VERDADERA, LS, PBCE_GAE, PBCE_SGE, PBCE_GEC, PBCE_MUSIC, PBCE_ID)

# Etiquetas de los estimadores de desfase
GAE = "GAE"
SGE = "SGE"
GEC = "GEC"
MUSIC = "MUSIC"
ID = "ID"
METODOS_FASE = (GAE, SGE, GEC, MUSIC, ID)


def envolver_fase(valores):
    """
    Envuelve desfases (ciclos) al intervalo [-1/2, 1/2).

    Args:
        valores (float o array): Desfases en ciclos

    Returns:
        numpy.ndarray: Desfases envueltos
    """
    x = np.asarray(valores, dtype=float)
    y = np.mod(x + 0.5, 1.0) - 0.5
    # mod puede devolver 1.0 por redondeo para valores apenas menores que -1/2
    return np.where(y >= 0.5, -0.5, y)


def distancia_circular(a, b):
    """Distancia entre desfases medida sobre el círculo (ciclos)."""
    return np.abs(envolver_fase(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


@dataclass
class EstimacionCovarianza:
    """
    Matriz de correlación N×N con su procedencia.

    Attributes:
        matriz: Matriz compleja N×N (solo lectura)
        metodo: Etiqueta en METODOS_COVARIANZA
        n_muestras: Número de muestras T usadas (0 para la verdadera)
    """
    matriz: np.ndarray
    metodo: str = VERDADERA
    n_muestras: int = 0

    def __post_init__(self):
        matriz = np.array(self.matriz, dtype=complex)
        if matriz.ndim != 2 or matriz.shape[0] != matriz.shape[1]:
            raise ErrorDimension(f"Se esperaba una matriz cuadrada, se recibió {matriz.shape}")
        if self.metodo not in METODOS_COVARIANZA:
            raise ErrorArgumentoInvalido(f"Método '{self.metodo}' no reconocido")
        matriz.flags.writeable = False
        self.matriz = matriz

    @property
    def n(self):
        return self.matriz.shape[0]

    def es_hermitica(self, tol=1e-10):
        escala = max(1.0, float(np.max(np.abs(self.matriz))))
        return bool(np.max(np.abs(self.matriz - self.matriz.conj().T)) <= tol * escala)

    def con_matriz(self, matriz, metodo=None):
        """Nueva estimación con la misma procedencia y otra matriz."""
        return EstimacionCovarianza(matriz, metodo or self.metodo, self.n_muestras)

    def a_dataframe(self):
        """Formato largo fila-mayor: fila, columna, re, im."""
        filas, columnas = np.indices(self.matriz.shape)
        return pd.DataFrame({
            'fila': filas.ravel(),
            'columna': columnas.ravel(),
            're': self.matriz.real.ravel(),
            'im': self.matriz.imag.ravel(),
        })

    def a_csv(self, ruta):
        """
        Exporta la matriz a CSV para depuración.

        Args:
            ruta (str o Path): Archivo de salida

        Returns:
            Path: Ruta escrita
        """
        ruta = Path(ruta)
        self.a_dataframe().to_csv(ruta, index=False, float_format='%.17g')
        return ruta


@dataclass
class EstimacionFases:
    """
    Lista ordenada de S desfases de recepción (ciclos en [-1/2, 1/2)).

    Attributes:
        valores: Desfases envueltos y ordenados de forma ascendente
        metodo: Etiqueta en METODOS_FASE
        diagnosticos: Residuos, ventanas, relleno de picos, etc.
    """
    valores: np.ndarray
    metodo: str = GAE
    diagnosticos: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.metodo not in METODOS_FASE:
            raise ErrorArgumentoInvalido(f"Método de fase '{self.metodo}' no reconocido")
        valores = np.sort(envolver_fase(np.atleast_1d(np.asarray(self.valores, dtype=float))))
        valores.flags.writeable = False
        self.valores = valores

    def __len__(self):
        return len(self.valores)
