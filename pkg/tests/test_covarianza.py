"""
Pruebas de LS, PBCE, MSE y expresiones cerradas.
"""

import dataclasses
import sys
import warnings
from pathlib import Path

# Agregar la raíz del proyecto al path
sys.path.append(str(Path(__file__).parent.parent))

import unittest

import numpy as np
import numpy.testing as npt

from estimador_interferencia.covarianza import (
    pseudoinversa,
    proyector_columnas,
    separar_duplicados,
    estimacion_ls,
    eliminar_ruido,
    hermitizar,
    recortar_psd,
    covarianza_interna,
    reconstruccion_pbce,
    reconstruccion_pbce_directa,
    error_cuadratico,
    gamma_ls,
    gamma_pbce,
    oraculo_varianza_producto,
)
from estimador_interferencia.errores import ErrorArgumentoInvalido, ErrorDimension, ErrorRango
from estimador_interferencia.escenario import (
    ConfigEscenario,
    sortear_rayos,
    generar_muestras,
    covarianza_verdadera,
    covarianza_interferencia,
    covarianza_fuentes,
    base_de_rayos,
    base_direcciones,
    ruido_para_rot,
)
from estimador_interferencia.tipos import EstimacionFases, ID, LS, distancia_circular


def _escenario(n=8, interferentes=1, rayos=3, semilla=0, **extra):
    cfg = ConfigEscenario(n_antenas=n, n_interferentes=interferentes, n_rayos=rayos,
                          aoa_media=0.3, **extra)
    return cfg, sortear_rayos(cfg, np.random.default_rng(semilla))


class TestLS(unittest.TestCase):

    def test_una_muestra(self):
        ls = estimacion_ls(np.array([[1.0, 0.0]]))
        npt.assert_allclose(ls.matriz, [[1, 0], [0, 0]])
        self.assertEqual(ls.metodo, LS)
        self.assertEqual(ls.n_muestras, 1)

    def test_dos_muestras(self):
        ls = estimacion_ls(np.array([[1.0, 0.0], [0.0, 1.0]]))
        npt.assert_allclose(ls.matriz, 0.5 * np.eye(2))

    def test_lote_vacio(self):
        with self.assertRaises(ErrorArgumentoInvalido):
            estimacion_ls(np.zeros((0, 4)))

    def test_insesgado(self):
        cfg, rayos = _escenario(n=4)
        verdadera = covarianza_verdadera(rayos, cfg).matriz
        rng = np.random.default_rng(1)
        lote = generar_muestras(rayos, cfg, 2 * 10_000, rng)
        # Media de 10⁴ estimaciones con T = 2 = estimación con todas las muestras
        bloques = lote.muestras.reshape(10_000, 2, 4)
        media = np.mean([estimacion_ls(b).matriz for b in bloques], axis=0)
        escala = np.max(np.abs(verdadera))
        self.assertLess(np.max(np.abs(media - verdadera)) / escala, 0.05)

    def test_hermitica(self):
        rng = np.random.default_rng(2)
        muestras = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
        self.assertTrue(estimacion_ls(muestras).es_hermitica())


class TestOperacionesBasicas(unittest.TestCase):

    def test_eliminar_ruido(self):
        npt.assert_allclose(eliminar_ruido(np.eye(3), 1.0).matriz, 0)
        npt.assert_allclose(eliminar_ruido(2 * np.eye(3), 1.0).matriz, np.eye(3))
        npt.assert_allclose(eliminar_ruido(0.5 * np.eye(3), 1.0).matriz, -0.5 * np.eye(3))

    def test_hermitizar(self):
        m = np.array([[1, 1j], [0, 1]])
        npt.assert_allclose(hermitizar(m).matriz, [[1, 0.5j], [-0.5j, 1]])
        h = np.array([[2, 1 - 1j], [1 + 1j, 3]])
        npt.assert_allclose(hermitizar(h).matriz, h)
        diferencia = hermitizar(m).matriz - m
        npt.assert_allclose(diferencia, -diferencia.conj().T)

    def test_recortar_psd(self):
        recortada = recortar_psd(np.diag([2.0, -1.0])).matriz
        npt.assert_allclose(recortada, np.diag([2.0, 0.0]), atol=1e-12)

    def test_pseudoinversa_rango(self):
        a = base_direcciones(6, [0.1, 0.1]).matriz
        _, rango = pseudoinversa(a)
        self.assertEqual(rango, 1)
        _, rango = pseudoinversa(base_direcciones(6, [0.1, 0.3]).matriz)
        self.assertEqual(rango, 2)

    def test_separar_duplicados(self):
        fases, n = separar_duplicados([0.2, 0.2, -0.1])
        self.assertEqual(n, 1)
        self.assertEqual(len(np.unique(fases)), 3)
        _, n = separar_duplicados([0.2, -0.3])
        self.assertEqual(n, 0)

    def test_separar_triple_coincidencia(self):
        fases, n = separar_duplicados([0.1, 0.1, 0.1])
        self.assertEqual(n, 2)
        npt.assert_allclose(np.sort(fases), [0.1, 0.1 + 1e-7, 0.1 + 2e-7], atol=1e-12)
        _, rango = pseudoinversa(base_direcciones(6, fases).matriz)
        self.assertEqual(rango, 3)

    def test_separar_en_el_borde(self):
        fases, n = separar_duplicados([-0.5, 0.5 - 1e-12, 0.2])
        self.assertEqual(n, 1)
        distancias = distancia_circular(fases[:, None], fases[None, :])
        self.assertGreater(np.min(distancias[~np.eye(3, dtype=bool)]), 5e-8)

    def test_proyector_columnas(self):
        a = base_direcciones(8, [0.1, 0.1 + 1e-4, 0.1 + 2e-4, 0.1 + 3e-4]).matriz
        proyector, rango = proyector_columnas(a)
        self.assertEqual(rango, 4)
        npt.assert_allclose(proyector, proyector.conj().T, atol=1e-14)
        npt.assert_allclose(proyector @ proyector, proyector, atol=1e-12)
        npt.assert_allclose(np.real(np.trace(proyector)), 4.0, atol=1e-10)


class TestPbce(unittest.TestCase):

    def test_punto_fijo(self):
        cfg, rayos = _escenario()
        verdadera = covarianza_verdadera(rayos, cfg)
        fases = EstimacionFases(rayos.fases_recepcion(), ID)
        pbce = reconstruccion_pbce(verdadera, fases, cfg.potencia_ruido)
        npt.assert_allclose(pbce.matriz, verdadera.matriz, atol=1e-9)
        self.assertEqual(pbce.metodo, 'PBCE-ID')

    def test_base_completa_dft(self):
        n = 6
        rng = np.random.default_rng(3)
        muestras = rng.standard_normal((4, n)) + 1j * rng.standard_normal((4, n))
        ls = estimacion_ls(muestras)
        fases = EstimacionFases(np.arange(n) / n, ID)
        npt.assert_allclose(reconstruccion_pbce(ls, fases, 0.7).matriz,
                            hermitizar(ls).matriz, atol=1e-10)

    def test_formas_equivalentes(self):
        cfg, rayos = _escenario(semilla=4)
        lote = generar_muestras(rayos, cfg, 3, np.random.default_rng(5))
        ls = estimacion_ls(lote)
        fases = rayos.fases_recepcion()
        npt.assert_allclose(reconstruccion_pbce(ls, fases, 1.0).matriz,
                            reconstruccion_pbce_directa(ls, fases, 1.0), atol=1e-9)

    def test_consistencia_interna(self):
        cfg, rayos = _escenario(semilla=6)
        lote = generar_muestras(rayos, cfg, 2, np.random.default_rng(7))
        ls = estimacion_ls(lote)
        base = base_de_rayos(rayos, cfg.n_antenas)
        pbce = reconstruccion_pbce(ls, rayos.fases_recepcion(), 1.0)
        self.assertTrue(pbce.es_hermitica())
        npt.assert_allclose(covarianza_interna(pbce, base, 1.0),
                            covarianza_interna(ls, base, 1.0), atol=1e-9)

    def test_fuentes_verdaderas_recuperadas(self):
        cfg, rayos = _escenario(semilla=8)
        verdadera = covarianza_verdadera(rayos, cfg)
        base = base_de_rayos(rayos, cfg.n_antenas)
        npt.assert_allclose(covarianza_interna(verdadera, base, cfg.potencia_ruido),
                            covarianza_fuentes(rayos, cfg), atol=1e-9)

    def test_mas_fuentes_que_antenas(self):
        with self.assertRaises(ErrorDimension):
            reconstruccion_pbce(np.eye(3), np.linspace(-0.4, 0.4, 4), 1.0)

    def test_duplicados_avisan(self):
        with warnings.catch_warnings(record=True) as avisos:
            warnings.simplefilter("always")
            reconstruccion_pbce(np.eye(6), [0.1, 0.1], 1.0)
        self.assertTrue(any(issubclass(a.category, RuntimeWarning) for a in avisos))

    def test_pbce_mejor_que_ls_con_ruido_alto(self):
        # Escenario aleatorio por ensayo (N=32, L=4, N_g=3), ROT = -10 dB, T = 2
        cfg = ConfigEscenario()
        rng = np.random.default_rng(10)
        mejores, ensayos = 0, 1000
        for _ in range(ensayos):
            rayos = sortear_rayos(cfg, rng)
            sigma2 = ruido_para_rot(covarianza_interferencia(rayos, cfg), -10.0)
            cfg_rot = dataclasses.replace(cfg, potencia_ruido=sigma2)
            verdadera = covarianza_verdadera(rayos, cfg_rot)
            ls = estimacion_ls(generar_muestras(rayos, cfg_rot, 2, rng))
            pbce = reconstruccion_pbce(ls, rayos.fases_recepcion(), sigma2)
            if (np.linalg.norm(pbce.matriz - verdadera.matriz)
                    <= np.linalg.norm(ls.matriz - verdadera.matriz)):
                mejores += 1
        self.assertGreaterEqual(mejores / ensayos, 0.95)

    def test_fases_casi_coincidentes(self):
        # Cuatro desfases a 1e-5 ciclos entre sí: cond(Â) del orden de 1e9
        n, t = 32, 2
        fases = np.array([-0.3, 0.1, 0.1 + 1e-5, 0.1 + 2e-5, 0.1 + 3e-5])
        potencias = np.array([4.0, 3.0, 1.0, 2.0, 1.5])
        a = base_direcciones(n, fases).matriz
        r_int = (a * potencias) @ a.conj().T
        sigma2 = np.real(np.trace(r_int)) / n / 0.1
        verdadera = r_int + sigma2 * np.eye(n)
        rng = np.random.default_rng(16)
        for _ in range(50):
            x = (rng.standard_normal((t, 5)) + 1j * rng.standard_normal((t, 5))) * np.sqrt(potencias / 2)
            ruido = (rng.standard_normal((t, n)) + 1j * rng.standard_normal((t, n))) * np.sqrt(sigma2 / 2)
            ls = estimacion_ls(x @ a.T + ruido)
            pbce = reconstruccion_pbce(ls, EstimacionFases(fases, ID), sigma2)
            error_ls = np.linalg.norm(ls.matriz - verdadera)
            error_pbce = np.linalg.norm(pbce.matriz - verdadera)
            self.assertLessEqual(error_pbce, error_ls + 1e-6 * np.linalg.norm(verdadera))
            npt.assert_allclose(reconstruccion_pbce_directa(ls, fases, sigma2), pbce.matriz,
                                atol=1e-8 * np.linalg.norm(verdadera))


class TestMse(unittest.TestCase):

    def test_valores(self):
        r = np.diag([1.0, 2.0, 3.0, 4.0])
        self.assertEqual(error_cuadratico(r, r), 0.0)
        self.assertAlmostEqual(error_cuadratico(r + np.eye(4), r), 1 / 4)
        self.assertAlmostEqual(error_cuadratico(r + np.ones((4, 4)), r), 1.0)

    def test_dimensiones(self):
        with self.assertRaises(ErrorDimension):
            error_cuadratico(np.eye(2), np.eye(3))


class TestExpresionesCerradas(unittest.TestCase):

    def test_gamma_ls_ruido_blanco(self):
        self.assertAlmostEqual(gamma_ls(2.0 * np.eye(5), 3), 4.0 / 3)
        self.assertAlmostEqual(gamma_ls(np.eye(32), 4), 0.25)

    def test_gamma_pbce_base_completa(self):
        cfg, rayos = _escenario()
        r = covarianza_verdadera(rayos, cfg)
        base = base_direcciones(cfg.n_antenas, np.arange(cfg.n_antenas) / cfg.n_antenas)
        self.assertAlmostEqual(gamma_pbce(r, base, 1.0, 4), gamma_ls(r, 4))

    def test_gamma_pbce_sin_ruido(self):
        cfg, rayos = _escenario(semilla=11)
        r = covarianza_verdadera(rayos, cfg, 0.0)
        base = base_de_rayos(rayos, cfg.n_antenas)
        for forma in ('proyectada', 'literal'):
            self.assertAlmostEqual(gamma_pbce(r, base, 0.0, 2, forma=forma), gamma_ls(r, 2))

    def test_gamma_pbce_menor_que_ls(self):
        cfg, rayos = _escenario(semilla=12)
        r = covarianza_verdadera(rayos, cfg)
        base = base_de_rayos(rayos, cfg.n_antenas)
        self.assertLess(gamma_pbce(r, base, 1.0, 2), gamma_ls(r, 2))

    def test_gamma_pbce_rango_deficiente(self):
        base = base_direcciones(6, [0.2, 0.2])
        with self.assertRaises(ErrorRango):
            gamma_pbce(np.eye(6), base, 1.0, 2)

    def test_forma_desconocida(self):
        base = base_direcciones(6, [0.2])
        with self.assertRaises(ErrorArgumentoInvalido):
            gamma_pbce(np.eye(6), base, 1.0, 2, forma='otra')

    def test_montecarlo_frente_a_gamma(self):
        cfg, rayos = _escenario(semilla=13)
        verdadera = covarianza_verdadera(rayos, cfg)
        base = base_de_rayos(rayos, cfg.n_antenas)
        fases = EstimacionFases(rayos.fases_recepcion(), ID)
        rng = np.random.default_rng(14)
        t, ensayos = 4, 3000
        mse_ls, mse_pbce = [], []
        for _ in range(ensayos):
            ls = estimacion_ls(generar_muestras(rayos, cfg, t, rng))
            mse_ls.append(error_cuadratico(ls, verdadera))
            mse_pbce.append(error_cuadratico(reconstruccion_pbce(ls, fases, 1.0), verdadera))
        npt.assert_allclose(np.mean(mse_ls), gamma_ls(verdadera, t), rtol=0.1)
        npt.assert_allclose(np.mean(mse_pbce), gamma_pbce(verdadera, base, 1.0, t), rtol=0.1)


class TestOraculoProducto(unittest.TestCase):

    def test_independientes(self):
        analitica, _ = oraculo_varianza_producto(2.0, 3.0, 0.0, 10, np.random.default_rng(0))
        self.assertEqual(analitica, 6.0)

    def test_misma_variable(self):
        analitica, empirica = oraculo_varianza_producto(1.5, 1.5, 1.0, 500_000,
                                                        np.random.default_rng(1))
        self.assertAlmostEqual(analitica, 2.25)
        npt.assert_allclose(empirica, analitica, rtol=0.03)

    def test_correlacionadas(self):
        analitica, empirica = oraculo_varianza_producto(2.0, 3.0, 0.6 + 0.3j, 1_000_000,
                                                        np.random.default_rng(2))
        npt.assert_allclose(empirica, 6.0, rtol=0.02)
        self.assertEqual(analitica, 6.0)

    def test_xi_fuera_de_rango(self):
        with self.assertRaises(ErrorArgumentoInvalido):
            oraculo_varianza_producto(1.0, 1.0, 1.2, 10, np.random.default_rng(3))


if __name__ == '__main__':
    unittest.main()
