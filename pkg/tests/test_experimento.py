"""
Pruebas del plan y la ejecución de experimentos de Monte-Carlo.

Se usan escenarios pequeños y estimadores sin SDP para que la corrida
completa tarde pocos segundos.
"""

import sys
import json
import tempfile
from pathlib import Path

# Agregar la raíz del proyecto al path
sys.path.append(str(Path(__file__).parent.parent))

import unittest
import warnings

import numpy as np
import pandas as pd

from configuracion.config import REJILLA_ETA
from estimador_interferencia.errores import ErrorConfiguracion
from estimador_interferencia.experimento import (
    COLUMNAS_ENSAYOS,
    PlanExperimento,
    plan_desde_dict,
    cargar_plan,
    generadores_ensayo,
    error_fases,
    calibrar_eta,
    completar_throughput,
    agregar_resultados,
    ejecutar_experimento,
)

ESCENARIO_PEQUENO = {'n_bs_antennas': 8, 'n_interferers': 1, 'n_rays': 2, 'rng_seed': 11}


def _plan(**cambios):
    argumentos = dict(escenario=dict(ESCENARIO_PEQUENO), rot_db=[0, 10], valores_t=[2, 4],
                      estimadores=['LS', 'PBCE-MUSIC', 'PBCE-ID'], ensayos=4, eta=0.5)
    argumentos.update(cambios)
    return PlanExperimento(**argumentos)


class TestPlan(unittest.TestCase):

    def test_semilla_del_escenario(self):
        self.assertEqual(_plan().semilla, 11)
        self.assertEqual(_plan(semilla=3).semilla, 3)

    def test_errores_de_validacion(self):
        casos = [
            dict(estimadores=[]),
            dict(estimadores=['LS', 'ESPRIT']),
            dict(estimadores=['LS', 'LS']),
            dict(ensayos=0),
            dict(valores_t=[0, 2]),
            dict(rot_db=[float('nan')]),
            dict(paso_delta=0.0),
            dict(eta=1.0),
            dict(sdp={'iteraciones': 10}),
            dict(escenario={'n_bs_antennas': 4, 'n_interferers': 2, 'n_rays': 2}),
            dict(n_rejilla=3),
        ]
        for cambios in casos:
            with self.subTest(cambios=cambios):
                with self.assertRaises(ErrorConfiguracion):
                    _plan(**cambios)

    def test_claves_desconocidas(self):
        with self.assertRaises(ErrorConfiguracion):
            plan_desde_dict({'scenario': ESCENARIO_PEQUENO, 'trails': 10})

    def test_rutas_relativas(self):
        with tempfile.TemporaryDirectory() as carpeta:
            carpeta = Path(carpeta)
            with open(carpeta / "esc.json", 'w', encoding='utf-8') as f:
                json.dump(ESCENARIO_PEQUENO, f)
            with open(carpeta / "plan.json", 'w', encoding='utf-8') as f:
                json.dump({'scenario': 'esc.json', 'output_dir': 'salida',
                           'estimators': ['LS']}, f)
            plan = cargar_plan(carpeta / "plan.json")
            self.assertEqual(plan.escenario.n_antenas, 8)
            self.assertEqual(plan.salida, carpeta / "salida")

    def test_archivos_inexistentes(self):
        with self.assertRaises(ErrorConfiguracion):
            cargar_plan("/no/existe/plan.json")
        with self.assertRaises(ErrorConfiguracion):
            plan_desde_dict({'scenario': 'falta.json'}, base=Path("/no/existe"))

    def test_a_dict(self):
        documento = _plan().a_dict()
        self.assertEqual(documento['estimators'], ['LS', 'PBCE-MUSIC', 'PBCE-ID'])
        self.assertEqual(documento['scenario']['n_bs_antennas'], 8)


class TestUtilidades(unittest.TestCase):

    def test_generadores_independientes(self):
        a = [g.standard_normal() for g in generadores_ensayo(5, 0)]
        b = [g.standard_normal() for g in generadores_ensayo(5, 0)]
        c = [g.standard_normal() for g in generadores_ensayo(5, 1)]
        self.assertEqual(a, b)
        self.assertNotEqual(a, c)
        self.assertEqual(len(set(a)), 4)

    def test_error_fases_empareja(self):
        self.assertAlmostEqual(error_fases([0.4, -0.1], [-0.1, 0.45]), 0.025)
        self.assertAlmostEqual(error_fases([0.49], [-0.49]), 0.02)
        self.assertEqual(error_fases([], []), 0.0)
        self.assertAlmostEqual(error_fases([0.4, -0.1], [-0.1, 0.45], maximo=True), 0.05)

    def test_calibracion_en_rejilla(self):
        plan = _plan(estimadores=['PBCE-GAE'], eta=None, sorteos_calibracion=1,
                     sdp={'max_iter': 300, 'epsilon': 1e-5})
        eta, curva = calibrar_eta(plan, 10.0)
        self.assertIn(eta, REJILLA_ETA)
        self.assertEqual(set(curva), set(REJILLA_ETA))
        self.assertEqual(curva[eta], min(curva.values()))

    def test_completar_throughput(self):
        df = pd.DataFrame({
            'estimador': ['LS'] * 3 + ['PBCE-ID'],
            'T': [2] * 4,
            'rot_db': [0.0] * 4,
            'C': [1.0, 1.0, 1.0, 2.0],
            'C_est': [1.0, 1.0, 1.0, 4.0],
            'delta': np.nan,
            'rho': np.nan,
            'error': ['', '', '', ''],
        })
        completo = completar_throughput(df, 0.25)
        self.assertEqual(list(completo['delta']), [1.0, 1.0, 1.0, 0.5])
        self.assertEqual(list(completo['rho']), [1.0, 1.0, 1.0, 2.0])
        self.assertTrue(df['delta'].isna().all())

    def test_agregar_cuenta_errores(self):
        df = pd.DataFrame([
            {'estimador': 'LS', 'T': 2, 'rot_db': 0.0, 'error': '', 'delta': 1.0},
            {'estimador': 'LS', 'T': 2, 'rot_db': 0.0, 'error': 'ErrorRango', 'delta': np.nan},
            {'estimador': 'LS', 'T': 2, 'rot_db': 0.0, 'error': '', 'delta': 1.0},
        ])
        for metrica in ('mse', 'gamma_ls', 'gamma_pbce', 'C', 'C_est', 'C_opt', 'rho',
                        'iteraciones'):
            df[metrica] = [1.0, np.nan, 3.0]
        agregado = agregar_resultados(df)
        self.assertEqual(len(agregado), 1)
        self.assertEqual(agregado['n'].iloc[0], 2)
        self.assertEqual(agregado['n_errores'].iloc[0], 1)
        self.assertEqual(agregado['mse'].iloc[0], 2.0)
        self.assertEqual(agregado['delta'].iloc[0], 1.0)


class TestEjecucion(unittest.TestCase):

    def setUp(self):
        self.carpeta = tempfile.TemporaryDirectory()
        self.raiz = Path(self.carpeta.name)

    def tearDown(self):
        self.carpeta.cleanup()

    def _ejecutar(self, nombre, plan=None, hilos=1):
        return ejecutar_experimento(plan or _plan(), hilos=hilos, salida=self.raiz / nombre,
                                    mostrar_progreso=False)

    def test_archivos_y_columnas(self):
        resultado = self._ejecutar("a")
        for ruta in resultado['rutas'].values():
            self.assertTrue(ruta.exists())
        ensayos = resultado['ensayos']
        self.assertEqual(list(ensayos.columns), COLUMNAS_ENSAYOS)
        self.assertEqual(len(ensayos), 4 * 2 * 2 * 3)
        self.assertEqual(resultado['n_errores'], 0)
        self.assertEqual(len(resultado['agregado']), 2 * 2 * 3)

    def test_reproducible_y_sin_depender_de_hilos(self):
        self._ejecutar("a")
        self._ejecutar("b", hilos=2)
        primero = (self.raiz / "a" / "ensayos.csv").read_bytes()
        segundo = (self.raiz / "b" / "ensayos.csv").read_bytes()
        self.assertEqual(primero, segundo)

    def test_metricas_coherentes(self):
        ensayos = self._ejecutar("a")['ensayos']
        self.assertTrue(((ensayos['delta'] >= 0) & (ensayos['delta'] <= 1)).all())
        self.assertTrue((ensayos['rho'] <= ensayos['delta'] * ensayos['C_est'] + 1e-12).all())
        self.assertTrue((ensayos['gamma_pbce'] <= ensayos['gamma_ls']).all())
        self.assertTrue((ensayos['C'] <= ensayos['C_opt'] + 1e-9).all())
        self.assertTrue((ensayos['mse'] >= 0).all())

    def test_rayos_fijos(self):
        ensayos = self._ejecutar("a", _plan(rayos_fijos=True))['ensayos']
        for _, grupo in ensayos.groupby(['T', 'rot_db']):
            self.assertEqual(grupo['gamma_ls'].nunique(), 1)

    def test_metadatos(self):
        resultado = self._ejecutar("a")
        with open(resultado['rutas']['metadatos'], 'r', encoding='utf-8') as f:
            metadatos = json.load(f)
        self.assertEqual(metadatos['n_errores'], 0)
        self.assertEqual(metadatos['eta'], {'0.0': 0.5, '10.0': 0.5})

    def test_estimadores_con_sdp(self):
        plan = _plan(estimadores=['PBCE-GAE', 'PBCE-SGE', 'PBCE-GEC'], rot_db=[10], valores_t=[4],
                     ensayos=2, sdp={'max_iter': 2000, 'epsilon': 1e-6})
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            resultado = self._ejecutar("sdp", plan)
        ensayos = resultado['ensayos']
        self.assertEqual(len(ensayos), 6)
        self.assertEqual(resultado['n_errores'], 0)
        self.assertEqual(set(ensayos['estimador']), {'PBCE-GAE', 'PBCE-SGE', 'PBCE-GEC'})
        self.assertTrue((ensayos['iteraciones'] > 0).all())
        self.assertTrue(np.isfinite(ensayos['mse']).all())


if __name__ == '__main__':
    unittest.main()
