"""
Pruebas de las baterías de validación con parámetros reducidos.
"""

import sys
from pathlib import Path

# Agregar la raíz del proyecto al path
sys.path.append(str(Path(__file__).parent.parent))

import unittest
import warnings

import numpy as np
import pandas as pd

from estimador_interferencia.errores import ErrorArgumentoInvalido
from estimador_interferencia.escenario import ConfigEscenario
from estimador_interferencia.validacion import (
    ORDEN_MSE,
    SUITES,
    comparar_medias,
    ejecutar_suite,
    verificar_orden,
)


class TestBaterias(unittest.TestCase):

    def test_tasas(self):
        resultado = ejecutar_suite('rate', enlaces=50)
        self.assertTrue(resultado['aprobada'])
        self.assertEqual(len(resultado['detalles']), 50)
        self.assertIn('tiempo_s', resultado)

    def test_varianza_producto(self):
        resultado = ejecutar_suite('appendix', n_tripletas=2, n_sorteos=200_000, tolerancia=0.05)
        self.assertTrue(resultado['aprobada'])
        self.assertEqual(resultado['suite'], 'appendix')

    def test_analisis_mse(self):
        resultado = ejecutar_suite('mse-analysis', ensayos=4000, valores_t=(2,), tolerancia=0.1)
        tabla = resultado['detalles']
        self.assertTrue(resultado['aprobada'])
        self.assertTrue((tabla['gamma_pbce'] < tabla['gamma_ls']).all())
        self.assertIn('gamma_pbce_literal', tabla.columns)

    def test_recuperacion_estructura(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            resultado = ejecutar_suite('recovery', instancias=3)
        tabla = resultado['detalles']
        self.assertEqual(len(tabla), 3)
        self.assertTrue(resultado['aprobada'])
        self.assertTrue((tabla['error_gae'] <= 1e-3).all())
        self.assertTrue((tabla['error_vandermonde'] <= 1e-6).all())
        self.assertTrue((tabla['error_sge'] <= 1e-6).all())
        self.assertTrue((tabla['error_music'] <= 1e-3).all())

    def test_bateria_desconocida(self):
        self.assertEqual(len(SUITES), 6)
        with self.assertRaises(ErrorArgumentoInvalido):
            ejecutar_suite('oracle')


class TestOrden(unittest.TestCase):

    def test_modos_de_comparacion(self):
        # umbral 2 * hypot(0.03, 0.04) = 0.1
        self.assertTrue(comparar_medias(1.0, 0.03, 1.15, 0.04, 'significativa'))
        self.assertFalse(comparar_medias(1.0, 0.03, 1.05, 0.04, 'significativa'))
        self.assertTrue(comparar_medias(1.0, 0.03, 1.05, 0.04, 'media'))
        self.assertFalse(comparar_medias(1.05, 0.03, 1.0, 0.04, 'media'))
        # por encima pero dentro del ruido
        self.assertTrue(comparar_medias(1.05, 0.03, 1.0, 0.04, 'tolerante'))
        self.assertFalse(comparar_medias(1.2, 0.03, 1.0, 0.04, 'tolerante'))
        with self.assertRaises(ErrorArgumentoInvalido):
            comparar_medias(1.0, 0.1, 2.0, 0.1, 'estricta')

    def test_verificar_orden_sintetico(self):
        agregado = pd.DataFrame({
            'estimador': ['LS', 'PBCE-SGE', 'PBCE-GAE', 'PBCE-ID'],
            'mse': [10.0, 5.0, 4.9, 1.0],
            'mse_ee': [0.5, 0.2, 0.2, 0.1],
        })
        tabla = verificar_orden(agregado, ORDEN_MSE)
        # sin GEC ni MUSIC quedan cuatro relaciones
        self.assertEqual(len(tabla), 4)
        por_par = tabla.set_index(['menor', 'mayor'])['cumple']
        self.assertTrue(por_par[('PBCE-ID', 'PBCE-GAE')])
        self.assertTrue(por_par[('PBCE-SGE', 'LS')])
        self.assertTrue(por_par[('PBCE-ID', 'LS')])
        # 4.9 frente a 5.0 no es significativa
        self.assertFalse(por_par[('PBCE-GAE', 'PBCE-SGE')])


class TestTendencias(unittest.TestCase):

    def setUp(self):
        self.escenario = ConfigEscenario(n_antenas=8, n_interferentes=1, n_rayos=2, semilla=11)

    def test_tendencia_mse_escenario_reducido(self):
        resultado = ejecutar_suite('mse-trend', ensayos=40, rot_db=(-10, 0),
                                   estimadores=('LS', 'PBCE-MUSIC', 'PBCE-ID'),
                                   escenario=self.escenario, eta=0.5, hilos=1)
        tabla = resultado['detalles']
        self.assertEqual(resultado['suite'], 'mse-trend')
        self.assertEqual(len(tabla), 2)
        self.assertTrue((tabla['rot_db'] == -10.0).all())
        fila = tabla[(tabla['menor'] == 'PBCE-ID') & (tabla['mayor'] == 'LS')].iloc[0]
        self.assertTrue(fila['cumple'])
        self.assertLess(fila['media_menor'], fila['media_mayor'])
        self.assertEqual(len(resultado['agregado']), 6)

    def test_tendencia_throughput_estructura(self):
        resultado = ejecutar_suite('throughput-trend', ensayos=20, valores_t=(2, 4),
                                   estimadores=('LS', 'PBCE-ID'), escenario=self.escenario,
                                   eta=0.5, hilos=1)
        tabla = resultado['detalles']
        self.assertEqual(resultado['suite'], 'throughput-trend')
        self.assertEqual(len(tabla), 4)
        conteo = tabla['comprobacion'].value_counts()
        self.assertEqual(conteo['no_decreciente'], 2)
        self.assertEqual(conteo['supera_ls'], 2)
        self.assertTrue((tabla[tabla['comprobacion'] == 'supera_ls']['estimador'] == 'PBCE-ID').all())
        self.assertEqual(resultado['aprobada'], bool(tabla['cumple'].all()))


if __name__ == '__main__':
    unittest.main()
