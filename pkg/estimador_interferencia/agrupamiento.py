"""
Agrupamiento balanceado de desfases sobre la circunferencia unidad.

Cada desfase β se representa como [cos 2πβ, sin 2πβ]; el agrupamiento es
un k-means con asignación balanceada (tamaños que difieren a lo sumo en 1)
y el centroide de cada grupo se convierte de nuevo a desfase con atan2.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.cluster import kmeans_plusplus

from .errores import ErrorArgumentoInvalido, ErrorNoDefinida
from .tipos import envolver_fase

logger = logging.getLogger(__name__)

MAX_ITER_AGRUPAMIENTO = 100


@dataclass
class EstadoAgrupamiento:
    """
    Attributes:
        puntos: (n, 2) vectores unitarios
        asignacion: (n,) grupo de cada punto
        centroides: (S, 2) media de cada grupo
        historial_inercia: Inercia tras cada barrido asignación/actualización
    """
    puntos: np.ndarray
    asignacion: np.ndarray
    centroides: np.ndarray
    historial_inercia: list = field(default_factory=list)

    @property
    def n_grupos(self):
        return self.centroides.shape[0]

    def tamanos(self):
        return np.bincount(self.asignacion, minlength=self.n_grupos)

    def inercia(self):
        return float(np.sum((self.puntos - self.centroides[self.asignacion]) ** 2))

    def fases(self):
        """Desfase de cada centroide, ordenado."""
        return np.sort(np.array([fase_de_centroide(c) for c in self.centroides]))


def puntos_circulo(fases):
    """β -> [cos 2πβ, sin 2πβ]."""
    fases = np.asarray(fases, dtype=float).ravel()
    return np.column_stack([np.cos(2 * np.pi * fases), np.sin(2 * np.pi * fases)])


def fase_de_centroide(centroide):
    """
    atan2(y, x)/(2π) envuelto a [-1/2, 1/2).

    Raises:
        ErrorNoDefinida: Si el centroide es el vector nulo
    """
    x, y = np.asarray(centroide, dtype=float)
    if x == 0.0 and y == 0.0:
        raise ErrorNoDefinida("Dirección indefinida: centroide nulo")
    return float(envolver_fase(np.arctan2(y, x) / (2 * np.pi)))


def asignacion_balanceada(puntos, centroides):
    """
    Asignación exacta de mínima distancia cuadrática con tamaños
    ⌊n/S⌋ o ⌊n/S⌋ + 1.

    Cada grupo recibe ⌊n/S⌋ plazas obligatorias (con una bonificación que
    fuerza a llenarlas) y, si n no es múltiplo de S, una plaza extra.
    """
    n = puntos.shape[0]
    n_grupos = centroides.shape[0]
    base, resto = divmod(n, n_grupos)

    distancias = np.sum((puntos[:, None, :] - centroides[None, :, :]) ** 2, axis=2)
    bonificacion = 1.0 + float(np.max(distancias, initial=0.0)) * n
    columnas, grupos = [], []
    for k in range(n_grupos):
        columnas.append(np.repeat(distancias[:, k:k + 1] - bonificacion, base, axis=1))
        grupos.extend([k] * base)
        if resto:
            columnas.append(distancias[:, k:k + 1])
            grupos.append(k)
    costo = np.hstack(columnas)
    filas, plazas = linear_sum_assignment(costo)
    asignacion = np.empty(n, dtype=int)
    asignacion[filas] = np.asarray(grupos)[plazas]
    return asignacion


def agrupar_fases(fases, n_grupos, rng=None, max_iter=MAX_ITER_AGRUPAMIENTO):
    """
    k-means balanceado de desfases sobre la circunferencia.

    Args:
        fases (array): Desfases en ciclos
        n_grupos (int): S
        rng (numpy.random.Generator): Semilla de la inicialización k-means++
        max_iter (int): Máximo de barridos

    Returns:
        EstadoAgrupamiento
    """
    if n_grupos < 1:
        raise ErrorArgumentoInvalido("El número de grupos debe ser ≥ 1")
    puntos = puntos_circulo(fases)
    if puntos.shape[0] < n_grupos:
        raise ErrorArgumentoInvalido(
            f"Hay {puntos.shape[0]} puntos para {n_grupos} grupos")

    rng = rng if rng is not None else np.random.default_rng(0)
    semilla = int(rng.integers(2 ** 31 - 1))
    centroides, _ = kmeans_plusplus(puntos, n_clusters=n_grupos, random_state=semilla)

    asignacion = None
    historial = []
    for barrido in range(max_iter):
        nueva = asignacion_balanceada(puntos, centroides)
        if asignacion is not None and np.array_equal(nueva, asignacion):
            break
        asignacion = nueva
        centroides = np.array([puntos[asignacion == k].mean(axis=0) for k in range(n_grupos)])
        historial.append(float(np.sum((puntos - centroides[asignacion]) ** 2)))
    logger.debug("Agrupamiento balanceado: %d barridos, inercia %.3e",
                 len(historial), historial[-1])
    return EstadoAgrupamiento(puntos, asignacion, centroides, historial)
