"""
Pruebas del módulo de escenario: vectores de dirección, rayos, muestras y
correlación verdadera.
"""

import sys
from pathlib import Path

# Agregar la raíz del proyecto al path
sys.path.append(str(Path(__file__).parent.parent))

import unittest

import numpy as np
import numpy.testing as npt

from estimador_interferencia.errores import ErrorArgumentoInvalido, ErrorConfiguracion
from estimador_interferencia.escenario import (
    ConfigEscenario,
    ConjuntoRayos,
    LoteMuestras,
    config_desde_dict,
    desfase_desde_angulo,
    vector_direccion,
    base_direcciones,
    colocar_interferentes,
    sortear_rayos,
    sintetizar_canales,
    base_de_rayos,
    componentes_fuente,
    generar_muestras,
    covarianza_verdadera,
    covarianza_verdadera_factorizada,
    covarianza_interferencia,
    rot_db,
    ruido_para_rot,
)


def _rayos_unitarios(beta=0.0):
    """Un interferente, un rayo, ganancia 1."""
    return ConjuntoRayos(
        ganancias=np.array([[1.0 + 0j]]),
        potencias=np.ones((1, 1)),
        aoa=np.zeros((1, 1)),
        aod=np.zeros((1, 1)),
        beta=np.array([[beta]]),
        gamma=np.zeros((1, 1)),
    )


class TestDireccion(unittest.TestCase):

    def test_desfase_desde_angulo(self):
        lam = 0.01
        self.assertAlmostEqual(desfase_desde_angulo(np.pi / 2, lam / 2, lam), 0.5)
        self.assertAlmostEqual(desfase_desde_angulo(0.0, lam / 2, lam), 0.0)
        self.assertAlmostEqual(desfase_desde_angulo(np.pi / 6, lam / 2, lam), 0.25)

    def test_longitud_onda_invalida(self):
        with self.assertRaises(ErrorArgumentoInvalido):
            desfase_desde_angulo(0.1, 0.5, 0.0)

    def test_vector_direccion(self):
        npt.assert_allclose(vector_direccion(4, 0.0), np.ones(4))
        npt.assert_allclose(vector_direccion(2, 0.5), [1, -1], atol=1e-12)
        npt.assert_allclose(vector_direccion(1, 0.37), [1])

    def test_simetria_conjugada(self):
        rng = np.random.default_rng(0)
        for beta in rng.uniform(-0.5, 0.5, size=5):
            npt.assert_allclose(vector_direccion(8, -beta), np.conj(vector_direccion(8, beta)))

    def test_base_direcciones_columnas(self):
        fases = [0.1, -0.3, 0.25]
        base = base_direcciones(6, fases)
        self.assertEqual(base.matriz.shape, (6, 3))
        for k, beta in enumerate(fases):
            npt.assert_allclose(base.matriz[:, k], vector_direccion(6, beta))

    def test_n_antenas_invalido(self):
        with self.assertRaises(ErrorArgumentoInvalido):
            vector_direccion(0, 0.1)


class TestConfiguracion(unittest.TestCase):

    def test_claves_desconocidas(self):
        with self.assertRaises(ErrorConfiguracion):
            config_desde_dict({'n_bs_antennas': 8, 'antenas': 4})

    def test_desde_dict(self):
        cfg = config_desde_dict({'n_bs_antennas': 8, 'n_interferers': 2, 'n_rays': 2,
                                 'aod_interval': [0.0, 1.0]})
        self.assertEqual(cfg.n_antenas, 8)
        self.assertEqual(cfg.n_fuentes, 4)
        self.assertEqual(cfg.intervalo_aod, (0.0, 1.0))

    def test_ruido_no_positivo(self):
        with self.assertRaises(ErrorConfiguracion):
            ConfigEscenario(potencia_ruido=0.0)

    def test_r_j_no_hermitica(self):
        with self.assertRaises(ErrorConfiguracion):
            ConfigEscenario(n_antenas_int=2, potencia_simbolos=np.array([[1, 1], [0, 1]]))

    def test_a_dict_vuelta(self):
        cfg = ConfigEscenario(n_antenas=8, n_interferentes=2, aoa_media=0.2)
        otra = config_desde_dict(cfg.a_dict())
        self.assertEqual(otra.n_antenas, 8)
        self.assertEqual(otra.aoa_media, 0.2)


class TestGeometria(unittest.TestCase):

    def test_este_y_norte(self):
        geometria = colocar_interferentes(500.0, n_interferentes=2)
        self.assertAlmostEqual(geometria['aoa_media'][0], 0.0)
        self.assertAlmostEqual(geometria['aoa_media'][1], np.pi / 2)

    def test_cuatro_vecinas_distintas(self):
        geometria = colocar_interferentes(500.0, n_interferentes=4)
        self.assertEqual(len(np.unique(np.round(geometria['aoa_media'], 9))), 4)
        npt.assert_allclose(geometria['distancias'], 250.0)

    def test_posicion_aleatoria_requiere_generador(self):
        with self.assertRaises(ErrorArgumentoInvalido):
            colocar_interferentes(500.0, rng=None, fraccion=None)


class TestRayos(unittest.TestCase):

    def test_soporte_degenerado(self):
        cfg = ConfigEscenario(n_antenas=8, n_interferentes=1, n_rayos=1, aoa_media=0.0,
                              soporte_aoa=0.0)
        rayos = sortear_rayos(cfg, np.random.default_rng(1))
        self.assertEqual(rayos.aoa[0, 0], 0.0)
        self.assertEqual(rayos.beta[0, 0], 0.0)

    def test_potencia_cero(self):
        cfg = ConfigEscenario(n_antenas=8, n_interferentes=2, n_rayos=3, potencia_rayos=0.0)
        rayos = sortear_rayos(cfg, np.random.default_rng(2))
        npt.assert_array_equal(rayos.ganancias, 0)

    def test_varianza_unitaria_de_ganancias(self):
        cfg = ConfigEscenario(n_antenas=4, n_interferentes=1000, n_rayos=100, aoa_media=0.0)
        rayos = sortear_rayos(cfg, np.random.default_rng(3))
        self.assertAlmostEqual(np.mean(np.abs(rayos.ganancias) ** 2), 1.0, delta=0.02)

    def test_aoa_dentro_del_soporte(self):
        cfg = ConfigEscenario(n_antenas=8, n_interferentes=3, n_rayos=4, aoa_media=0.4)
        rayos = sortear_rayos(cfg, np.random.default_rng(4))
        self.assertTrue(np.all(np.abs(rayos.aoa - 0.4) <= cfg.soporte_aoa / 2))


class TestCanales(unittest.TestCase):

    def test_canal_de_unos(self):
        cfg = ConfigEscenario(n_antenas=5, n_interferentes=1, n_rayos=1)
        canales = sintetizar_canales(_rayos_unitarios(), cfg)
        npt.assert_allclose(canales[0], np.ones((5, 1)))

    def test_rayo_nulo_inerte(self):
        cfg1 = ConfigEscenario(n_antenas=6, n_interferentes=1, n_rayos=1)
        cfg2 = ConfigEscenario(n_antenas=6, n_interferentes=1, n_rayos=2)
        rayos2 = ConjuntoRayos(
            ganancias=np.array([[1.0 + 0j, 0.0]]), potencias=np.ones((1, 2)),
            aoa=np.zeros((1, 2)), aod=np.zeros((1, 2)),
            beta=np.array([[0.2, -0.1]]), gamma=np.zeros((1, 2)))
        npt.assert_allclose(sintetizar_canales(rayos2, cfg2)[0],
                            sintetizar_canales(_rayos_unitarios(0.2), cfg1)[0])

    def test_rango_del_canal(self):
        cfg = ConfigEscenario(n_antenas=8, n_interferentes=2, n_rayos=3, n_antenas_int=2)
        rng = np.random.default_rng(5)
        for _ in range(5):
            for g in sintetizar_canales(sortear_rayos(cfg, rng), cfg):
                self.assertLessEqual(np.linalg.matrix_rank(g), 2)


class TestMuestras(unittest.TestCase):

    def test_solo_ruido(self):
        cfg = ConfigEscenario(n_antenas=4, n_interferentes=1, n_rayos=1, potencia_rayos=0.0)
        rng = np.random.default_rng(6)
        lote = generar_muestras(sortear_rayos(cfg, rng), cfg, 100_000, rng)
        muestral = lote.muestras.T @ lote.muestras.conj() / lote.n_muestras
        npt.assert_allclose(muestral, np.eye(4), atol=0.02)

    def test_rango_uno_sin_ruido(self):
        cfg = ConfigEscenario(n_antenas=8, n_interferentes=1, n_rayos=1, aoa_media=0.3)
        rng = np.random.default_rng(7)
        rayos = sortear_rayos(cfg, rng)
        lote = generar_muestras(rayos, cfg, 5, rng)
        a = vector_direccion(8, rayos.beta[0, 0])
        for y in lote.interferencia:
            coeficiente = np.vdot(a, y) / 8
            npt.assert_allclose(y, coeficiente * a, atol=1e-10)

    def test_dos_formas_de_generacion(self):
        cfg = ConfigEscenario(n_antenas=8, n_interferentes=2, n_rayos=3, n_antenas_int=2)
        rng = np.random.default_rng(8)
        rayos = sortear_rayos(cfg, rng)
        lote = generar_muestras(rayos, cfg, 6, rng)
        a = base_de_rayos(rayos, cfg.n_antenas).matriz
        dual = componentes_fuente(rayos, lote.simbolos) @ a.T
        self.assertLess(np.max(np.abs(dual - lote.interferencia)), 1e-10)

    def test_ventanas(self):
        lote = LoteMuestras(np.arange(14).reshape(7, 2))
        ventanas = lote.ventanas(3)
        self.assertEqual(len(ventanas), 2)
        npt.assert_array_equal(ventanas[1].muestras, lote.muestras[3:6])

    def test_ventanas_registran_sobrantes(self):
        lote = LoteMuestras(np.arange(14).reshape(7, 2))
        with self.assertLogs('estimador_interferencia.escenario', level='DEBUG') as registro:
            lote.ventanas(3)
        self.assertIn("se descartan las 1", registro.output[0])

    def test_t_invalido(self):
        cfg = ConfigEscenario(n_antenas=4, n_interferentes=1, n_rayos=1)
        rng = np.random.default_rng(9)
        with self.assertRaises(ErrorArgumentoInvalido):
            generar_muestras(sortear_rayos(cfg, rng), cfg, 0, rng)


class TestCovarianzaVerdadera(unittest.TestCase):

    def test_sin_interferentes(self):
        cfg = ConfigEscenario(n_antenas=6, n_interferentes=0, potencia_ruido=2.0)
        rayos = sortear_rayos(cfg, np.random.default_rng(10))
        npt.assert_allclose(covarianza_verdadera(rayos, cfg).matriz, 2.0 * np.eye(6))

    def test_un_rayo_unitario(self):
        cfg = ConfigEscenario(n_antenas=4, n_interferentes=1, n_rayos=1, potencia_ruido=0.5)
        r = covarianza_verdadera(_rayos_unitarios(), cfg).matriz
        npt.assert_allclose(r, np.ones((4, 4)) + 0.5 * np.eye(4))

    def test_forma_dual(self):
        cfg = ConfigEscenario(n_antenas=8, n_interferentes=3, n_rayos=3, n_antenas_int=2,
                              potencia_simbolos=[1.0, 2.0])
        rayos = sortear_rayos(cfg, np.random.default_rng(11))
        diferencia = (covarianza_verdadera(rayos, cfg).matriz
                      - covarianza_verdadera_factorizada(rayos, cfg).matriz)
        self.assertLess(np.linalg.norm(diferencia), 1e-10)

    def test_hermitica_y_psd(self):
        cfg = ConfigEscenario(n_antenas=8, n_interferentes=2, n_rayos=3)
        r = covarianza_verdadera(sortear_rayos(cfg, np.random.default_rng(12)), cfg)
        self.assertTrue(r.es_hermitica())
        self.assertGreaterEqual(np.min(np.linalg.eigvalsh(r.matriz)), cfg.potencia_ruido - 1e-9)


class TestRot(unittest.TestCase):

    def test_valores(self):
        self.assertAlmostEqual(rot_db(2 * np.eye(3), 1.0), 0.0)
        self.assertEqual(rot_db(np.eye(3), 1.0), -np.inf)
        self.assertAlmostEqual(rot_db(11 * 0.5 * np.eye(3), 0.5), 10.0)

    def test_ruido_para_rot_inversa(self):
        cfg = ConfigEscenario(n_antenas=8, n_interferentes=2, n_rayos=3)
        rayos = sortear_rayos(cfg, np.random.default_rng(13))
        r_int = covarianza_interferencia(rayos, cfg)
        for rot in (-10.0, 0.0, 15.0):
            sigma2 = ruido_para_rot(r_int, rot)
            self.assertAlmostEqual(rot_db(r_int + sigma2 * np.eye(8), sigma2), rot, places=9)

    def test_ruido_para_rot_sin_interferencia(self):
        with self.assertRaises(ErrorArgumentoInvalido):
            ruido_para_rot(np.zeros((4, 4)), 0.0)


if __name__ == '__main__':
    unittest.main()
