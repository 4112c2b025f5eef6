"""
Pruebas del agrupamiento balanceado sobre la circunferencia.
"""

import sys
from pathlib import Path

# Agregar la raíz del proyecto al path
sys.path.append(str(Path(__file__).parent.parent))

import unittest

import numpy as np
import numpy.testing as npt

from estimador_interferencia.agrupamiento import (
    puntos_circulo,
    fase_de_centroide,
    asignacion_balanceada,
    agrupar_fases,
)
from estimador_interferencia.errores import ErrorArgumentoInvalido, ErrorNoDefinida
from estimador_interferencia.tipos import distancia_circular


class TestCentroide(unittest.TestCase):

    def test_valores(self):
        self.assertAlmostEqual(fase_de_centroide([0.0, 1.0]), 0.25)
        self.assertEqual(fase_de_centroide([1.0, 0.0]), 0.0)
        self.assertEqual(fase_de_centroide([-1.0, 0.0]), -0.5)

    def test_escala_irrelevante(self):
        self.assertAlmostEqual(fase_de_centroide([0.3, 0.3]), fase_de_centroide([3.0, 3.0]))

    def test_vector_nulo(self):
        with self.assertRaises(ErrorNoDefinida):
            fase_de_centroide([0.0, 0.0])


class TestAgrupamiento(unittest.TestCase):

    def test_dos_pares(self):
        estado = agrupar_fases([0.1, 0.1, 0.5, 0.5], 2, np.random.default_rng(0))
        self.assertEqual(estado.asignacion[0], estado.asignacion[1])
        self.assertEqual(estado.asignacion[2], estado.asignacion[3])
        self.assertNotEqual(estado.asignacion[0], estado.asignacion[2])
        fases = estado.fases()
        self.assertLess(distancia_circular(fases[0], 0.5), 1e-12)
        self.assertLess(distancia_circular(fases[1], 0.1), 1e-12)

    def test_cruce_del_borde(self):
        estado = agrupar_fases([0.49, -0.49], 1, np.random.default_rng(1))
        self.assertLess(distancia_circular(estado.fases()[0], 0.5), 1e-12)

    def test_tres_grupos_compactos(self):
        rng = np.random.default_rng(2)
        centros = np.array([-0.3, 0.05, 0.35])
        fases = np.repeat(centros, 4) + 0.005 * rng.standard_normal(12)
        estado = agrupar_fases(rng.permutation(fases), 3, rng)
        npt.assert_array_equal(estado.tamanos(), [4, 4, 4])
        estimados = estado.fases()
        npt.assert_allclose(estimados, centros, atol=0.01)

    def test_tamanos_balanceados(self):
        rng = np.random.default_rng(3)
        for n, s in ((10, 3), (7, 2), (9, 4), (5, 5)):
            estado = agrupar_fases(rng.uniform(-0.5, 0.5, n), s, rng)
            tamanos = estado.tamanos()
            self.assertEqual(tamanos.sum(), n)
            self.assertLessEqual(tamanos.max() - tamanos.min(), 1)

    def test_inercia_no_crece(self):
        rng = np.random.default_rng(4)
        estado = agrupar_fases(rng.uniform(-0.5, 0.5, 40), 4, rng)
        historial = np.array(estado.historial_inercia)
        self.assertTrue(np.all(np.diff(historial) <= 1e-12))
        self.assertAlmostEqual(estado.inercia(), historial[-1])

    def test_asignacion_balanceada_directa(self):
        puntos = puntos_circulo([0.0, 0.01, 0.02, 0.03])
        centroides = puntos_circulo([0.0, 0.5])
        asignacion = asignacion_balanceada(puntos, centroides)
        # Todos están cerca del primer centroide pero el balance obliga a 2 y 2
        npt.assert_array_equal(np.bincount(asignacion, minlength=2), [2, 2])
        npt.assert_array_equal(asignacion, [0, 0, 1, 1])

    def test_promediado_reduce_el_error(self):
        rng = np.random.default_rng(5)
        verdaderas = np.array([-0.2, 0.25])
        mejores = 0
        for _ in range(100):
            ventanas = verdaderas + 0.01 * rng.standard_normal((10, 2))
            error_ventanas = np.mean(distancia_circular(ventanas, verdaderas))
            estimadas = agrupar_fases(ventanas.ravel(), 2, rng).fases()
            error_centroides = np.mean(distancia_circular(estimadas, verdaderas))
            mejores += error_centroides < error_ventanas
        self.assertGreaterEqual(mejores, 90)

    def test_argumentos_invalidos(self):
        with self.assertRaises(ErrorArgumentoInvalido):
            agrupar_fases([0.1, 0.2], 0)
        with self.assertRaises(ErrorArgumentoInvalido):
            agrupar_fases([0.1], 2)

    def test_reproducible(self):
        fases = np.random.default_rng(6).uniform(-0.5, 0.5, 20)
        a = agrupar_fases(fases, 3, np.random.default_rng(7))
        b = agrupar_fases(fases, 3, np.random.default_rng(7))
        npt.assert_array_equal(a.asignacion, b.asignacion)


if __name__ == '__main__':
    unittest.main()
