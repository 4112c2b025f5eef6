"""
Jerarquía de excepciones del estimador de interferencia.
"""

import numpy as np


class ErrorEstimador(Exception):
    """Raíz de todos los errores del paquete."""


class ErrorArgumentoInvalido(ErrorEstimador, ValueError):
    """Argumento fuera de dominio (longitud de onda, N = 0, |ξ| > 1, ...)."""


class ErrorDimension(ErrorArgumentoInvalido):
    """Dimensiones incompatibles entre matrices o vectores."""


class ErrorConfiguracion(ErrorArgumentoInvalido):
    """Escenario o plan de experimento inválido (claves desconocidas incluidas)."""


class ErrorNoDefinida(ErrorArgumentoInvalido):
    """
    Operación sin resultado definido: dirección de un vector nulo o
    blanqueo de una matriz no definida positiva.
    """

    def __init__(self, mensaje, autovalores=None):
        super().__init__(mensaje)
        self.autovalores = None if autovalores is None else np.asarray(autovalores)


class ErrorEsquema(ErrorEstimador):
    """Faltan columnas en un CSV agregado."""


class ErrorSinSubespacio(ErrorEstimador):
    """La matriz sin ruido no tiene autovalores positivos."""


class ErrorRango(ErrorEstimador, np.linalg.LinAlgError):
    """Rango numérico incompatible con la operación pedida."""


class ErrorConvergencia(ErrorEstimador, RuntimeError):
    """
    El solver no convergió en el número máximo de iteraciones.

    Lleva el mejor iterado factible encontrado y los residuos finales.
    """

    def __init__(self, mensaje, mejor_iterado=None, residuos=None):
        super().__init__(mensaje)
        self.mejor_iterado = mejor_iterado
        self.residuos = residuos or {}
