"""
Baterías de validación contra oráculos: fórmulas cerradas del MSE,
varianza del producto de gaussianas, recuperación sin rejilla y tasas
con estimación perfecta. Las baterías de tendencia corren el experimento
completo y comprueban el orden de los estimadores en MSE y throughput.
"""

import dataclasses
import logging
import tempfile
import time
from pathlib import Path

import numpy as np
import pandas as pd

from configuracion.config import ESTIMADORES_VALIDOS, N_REJILLA_MUSIC
from .covarianza import (
    estimacion_ls,
    reconstruccion_pbce,
    error_cuadratico,
    gamma_ls,
    gamma_pbce,
    oraculo_varianza_producto,
)
from .enlace import EnlaceRealizacion, reporte_tasa
from .errores import ErrorArgumentoInvalido, ErrorEstimador
from .escenario import (
    ConfigEscenario,
    sortear_rayos,
    generar_muestras,
    covarianza_verdadera,
    covarianza_interferencia,
    base_de_rayos,
    base_direcciones,
    ruido_para_rot,
)
from .estadisticas import diferencia_significativa
from .estimadores_angulo import estimacion_sge, estimacion_music
from .sin_rejilla import ConfigSdp, ToeplitzPSD, descomposicion_vandermonde, estimacion_gae
from .tipos import EstimacionFases, ID, distancia_circular
from .experimento import PlanExperimento, ejecutar_experimento, error_fases

logger = logging.getLogger(__name__)

SUITES = ('mse-analysis', 'appendix', 'recovery', 'rate', 'mse-trend', 'throughput-trend')

# Orden del MSE a ROT bajo: (menor, mayor, modo)
ORDEN_MSE = (
    ('PBCE-ID', 'PBCE-GAE', 'tolerante'),
    ('PBCE-ID', 'PBCE-GEC', 'tolerante'),
    ('PBCE-ID', 'PBCE-MUSIC', 'tolerante'),
    ('PBCE-GAE', 'PBCE-SGE', 'significativa'),
    ('PBCE-GEC', 'PBCE-SGE', 'significativa'),
    ('PBCE-MUSIC', 'PBCE-SGE', 'significativa'),
    ('PBCE-SGE', 'LS', 'significativa'),
    ('PBCE-ID', 'LS', 'significativa'),
)

MODOS_ORDEN = ('tolerante', 'media', 'significativa')


def _fases_separadas(rng, k, separacion):
    """k desfases en [-1/2, 1/2) con separación circular mínima dada."""
    while True:
        fases = rng.uniform(-0.5, 0.5, size=k)
        if k < 2:
            return fases
        distancias = distancia_circular(fases[:, None], fases[None, :])
        if np.min(distancias[~np.eye(k, dtype=bool)]) >= separacion:
            return fases


# ============================================================================
# FÓRMULAS CERRADAS DEL MSE
# ============================================================================

def suite_analisis_mse(ensayos=10_000, valores_t=(2, 4, 8), semilla=1, tolerancia=0.03):
    """
    MSE de Monte-Carlo de LS y PBCE-ID con rayos fijos (N=8, S=3) frente a
    Γ_LS y Γ_PBCE (formas proyectada y literal).
    """
    cfg = ConfigEscenario(n_antenas=8, n_interferentes=1, n_rayos=3, aoa_media=0.3, semilla=semilla)
    rng = np.random.default_rng(np.random.SeedSequence(semilla))
    rayos = sortear_rayos(cfg, rng)
    sigma2 = ruido_para_rot(covarianza_interferencia(rayos, cfg), 0.0)
    cfg_rot = dataclasses.replace(cfg, potencia_ruido=sigma2)
    verdadera = covarianza_verdadera(rayos, cfg_rot)
    base = base_de_rayos(rayos, cfg.n_antenas)
    fases = EstimacionFases(rayos.fases_recepcion(), ID)

    detalles = []
    for t in valores_t:
        mse_ls, mse_pbce = [], []
        for k in range(ensayos):
            rng_k = np.random.default_rng(np.random.SeedSequence(semilla, spawn_key=(k, t)))
            ls = estimacion_ls(generar_muestras(rayos, cfg_rot, t, rng_k))
            mse_ls.append(error_cuadratico(ls, verdadera))
            mse_pbce.append(error_cuadratico(reconstruccion_pbce(ls, fases, sigma2), verdadera))
        g_ls = gamma_ls(verdadera, t)
        g_pbce = gamma_pbce(verdadera, base, sigma2, t)
        g_literal = gamma_pbce(verdadera, base, sigma2, t, forma='literal')
        m_ls, m_pbce = float(np.mean(mse_ls)), float(np.mean(mse_pbce))
        detalles.append({
            'T': t,
            'mse_ls': m_ls, 'gamma_ls': g_ls, 'error_rel_ls': abs(m_ls - g_ls) / g_ls,
            'mse_pbce': m_pbce, 'gamma_pbce': g_pbce, 'error_rel_pbce': abs(m_pbce - g_pbce) / g_pbce,
            'gamma_pbce_literal': g_literal,
            'error_rel_pbce_literal': abs(m_pbce - g_literal) / g_literal,
        })
    tabla = pd.DataFrame(detalles)
    aprobada = bool((tabla['error_rel_ls'] <= tolerancia).all()
                    and (tabla['error_rel_pbce'] <= tolerancia).all())
    return {'suite': 'mse-analysis', 'aprobada': aprobada, 'detalles': tabla}


# ============================================================================
# VARIANZA DEL PRODUCTO
# ============================================================================

def suite_varianza_producto(n_tripletas=5, n_sorteos=1_000_000, semilla=2, tolerancia=0.02):
    """Var(x y*) = σx² σy² para tripletas (σx², σy², ξ) aleatorias."""
    rng = np.random.default_rng(semilla)
    detalles = []
    for _ in range(n_tripletas):
        var_x, var_y = rng.uniform(0.5, 4.0, size=2)
        xi = rng.uniform(0, 1) * np.exp(2j * np.pi * rng.uniform())
        analitica, empirica = oraculo_varianza_producto(var_x, var_y, xi, n_sorteos, rng)
        detalles.append({'var_x': var_x, 'var_y': var_y, 'xi': xi, 'analitica': analitica,
                         'empirica': empirica,
                         'error_rel': abs(empirica - analitica) / analitica})
    tabla = pd.DataFrame(detalles)
    return {'suite': 'appendix', 'aprobada': bool((tabla['error_rel'] <= tolerancia).all()),
            'detalles': tabla}


# ============================================================================
# RECUPERACIÓN SIN REJILLA
# ============================================================================

def suite_recuperacion(instancias=100, n=16, max_atomos=3, n_muestras=4, eta=0.05, semilla=3,
                       tolerancia=1e-3, tolerancia_vandermonde=1e-6, tolerancia_sge=1e-6,
                       n_rejilla=N_REJILLA_MUSIC):
    """
    GAE sobre mezclas sin ruido de hasta 3 átomos separados ≥ 1/N y
    descomposición de Vandermonde sobre Toeplitz construidas; además SGE y
    MUSIC con la correlación exacta.

    Los errores de desfase son la peor pareja de cada instancia. MUSIC se
    acepta dentro de la resolución de su rejilla, 1/n_rejilla.
    """
    rng = np.random.default_rng(semilla)
    config = ConfigSdp(eta=eta)
    detalles = []
    for instancia in range(instancias):
        k = int(rng.integers(1, max_atomos + 1))
        fases = _fases_separadas(rng, k, 1.0 / n)
        a = base_direcciones(n, fases).matriz

        # Vandermonde sobre Toeplitz construida
        potencias = rng.uniform(0.5, 5.0, size=k)
        q = ToeplitzPSD(((a * potencias) @ a.conj().T)[:, 0])
        try:
            descomposicion = descomposicion_vandermonde(q)
            orden = np.argsort(fases)
            if descomposicion.n_atomos != k:
                raise ErrorEstimador(f"{descomposicion.n_atomos} átomos en lugar de {k}")
            error_v = max(error_fases(descomposicion.fases, fases, maximo=True),
                          float(np.max(np.abs(descomposicion.potencias - potencias[orden]))))
        except ErrorEstimador:
            error_v = np.inf

        # GAE sobre T snapshots sin ruido
        amplitudes = (rng.standard_normal((n_muestras, k))
                      + 1j * rng.standard_normal((n_muestras, k))) / np.sqrt(2)
        try:
            gae = estimacion_gae(amplitudes @ a.T, config, k)
            error_gae = error_fases(gae.valores, fases, maximo=True)
        except ErrorEstimador:
            error_gae = np.inf

        # SGE y MUSIC con R exacta
        r = (a * potencias) @ a.conj().T + np.eye(n)
        try:
            error_sge = error_fases(estimacion_sge(r, 1.0, k, config).valores, fases, maximo=True)
        except ErrorEstimador:
            error_sge = np.inf
        error_music = error_fases(estimacion_music(r, 1.0, k, n_rejilla).valores, fases,
                                  maximo=True)

        detalles.append({'instancia': instancia, 'atomos': k, 'error_gae': error_gae,
                         'error_vandermonde': error_v, 'error_sge': error_sge,
                         'error_music': error_music})
    tabla = pd.DataFrame(detalles)
    aprobada = bool((tabla['error_gae'] <= tolerancia).all()
                    and (tabla['error_vandermonde'] <= tolerancia_vandermonde).all()
                    and (tabla['error_sge'] <= tolerancia_sge).all()
                    and (tabla['error_music'] <= 1.0 / n_rejilla).all())
    return {'suite': 'recovery', 'aprobada': aprobada, 'detalles': tabla}


# ============================================================================
# TASAS CON ESTIMACIÓN PERFECTA
# ============================================================================

def suite_tasas(enlaces=1000, n=8, semilla=4, tolerancia=1e-10):
    """Con R̂ = R: C = Ĉ = C_opt."""
    rng = np.random.default_rng(semilla)
    detalles = []
    for _ in range(enlaces):
        b = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
        r = b @ b.conj().T / n + rng.uniform(0.1, 2.0) * np.eye(n)
        h = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
        reporte = reporte_tasa(EnlaceRealizacion(h, 1.0, r, r), 1.0)
        detalles.append({'C': reporte.c, 'C_est': reporte.c_est, 'C_opt': reporte.c_opt,
                         'desviacion': max(abs(reporte.c - reporte.c_est),
                                           abs(reporte.c - reporte.c_opt))})
    tabla = pd.DataFrame(detalles)
    return {'suite': 'rate', 'aprobada': bool((tabla['desviacion'] <= tolerancia).all()),
            'detalles': tabla}


# ============================================================================
# TENDENCIAS DEL EXPERIMENTO
# ============================================================================

def comparar_medias(media_menor, ee_menor, media_mayor, ee_mayor, modo, k=2.0):
    """
    Comprueba que la primera media quede por debajo de la segunda.

    modo='tolerante': no la supera por más de k errores estándar combinados.
    modo='media': es estrictamente menor.
    modo='significativa': es menor y la diferencia supera k errores estándar.
    """
    if modo not in MODOS_ORDEN:
        raise ErrorArgumentoInvalido(f"Modo '{modo}' no reconocido; opciones: {', '.join(MODOS_ORDEN)}")
    significativa = diferencia_significativa(media_menor, ee_menor, media_mayor, ee_mayor, k)
    if modo == 'tolerante':
        return bool(media_menor <= media_mayor or not significativa)
    if modo == 'media':
        return bool(media_menor < media_mayor)
    return bool(media_menor < media_mayor and significativa)


def verificar_orden(agregado, relaciones, metrica='mse', k=2.0):
    """
    Evalúa relaciones (menor, mayor, modo) entre estimadores de un mismo
    punto (T, ROT) del agregado; se omiten las de estimadores ausentes.

    Returns:
        pandas.DataFrame: menor, mayor, modo, medias, errores estándar, cumple
    """
    por_estimador = agregado.set_index('estimador')
    filas = []
    for menor, mayor, modo in relaciones:
        if menor not in por_estimador.index or mayor not in por_estimador.index:
            continue
        m1, e1 = por_estimador.at[menor, metrica], por_estimador.at[menor, f'{metrica}_ee']
        m2, e2 = por_estimador.at[mayor, metrica], por_estimador.at[mayor, f'{metrica}_ee']
        filas.append({'menor': menor, 'mayor': mayor, 'modo': modo,
                      'media_menor': m1, 'ee_menor': e1, 'media_mayor': m2, 'ee_mayor': e2,
                      'cumple': comparar_medias(m1, e1, m2, e2, modo, k)})
    return pd.DataFrame(filas, columns=['menor', 'mayor', 'modo', 'media_menor', 'ee_menor',
                                        'media_mayor', 'ee_mayor', 'cumple'])


def _experimento_tendencia(nombre, rot_db, valores_t, ensayos, semilla, estimadores, escenario,
                           eta, sdp, hilos):
    plan = PlanExperimento(
        escenario=escenario if escenario is not None else ConfigEscenario(semilla=semilla),
        rot_db=list(rot_db), valores_t=list(valores_t), estimadores=list(estimadores),
        ensayos=ensayos, semilla=semilla, eta=eta, sdp=dict(sdp or {}))
    with tempfile.TemporaryDirectory() as carpeta:
        return ejecutar_experimento(plan, hilos=hilos, salida=Path(carpeta) / nombre,
                                    mostrar_progreso=False)


def suite_tendencia_mse(ensayos=500, rot_db=(-10, 0, 10), n_muestras=2, semilla=2024,
                        estimadores=ESTIMADORES_VALIDOS, escenario=None, eta=None, sdp=None,
                        hilos=None):
    """
    Orden del MSE con el escenario por defecto (N=32) y T = 2 al ROT más
    bajo: PBCE-ID ≤ GAE, GEC, MUSIC < SGE < LS, con cada desigualdad
    estricta significativa a 2 errores estándar.

    Con eta=None el experimento calibra η por ROT.
    """
    resultado = _experimento_tendencia('tendencia_mse', rot_db, [n_muestras], ensayos, semilla,
                                       estimadores, escenario, eta, sdp, hilos)
    agregado = resultado['agregado']
    rot_bajo = float(min(rot_db))
    punto = agregado[(agregado['T'] == n_muestras) & (agregado['rot_db'] == rot_bajo)]
    tabla = verificar_orden(punto, ORDEN_MSE, 'mse')
    tabla.insert(0, 'rot_db', rot_bajo)
    aprobada = bool(len(tabla) and tabla['cumple'].all())
    return {'suite': 'mse-trend', 'aprobada': aprobada, 'detalles': tabla,
            'agregado': agregado, 'etas': resultado['etas']}


def suite_tendencia_throughput(ensayos=200, rot=0.0, valores_t=tuple(range(2, 11)), semilla=2024,
                               estimadores=ESTIMADORES_VALIDOS, escenario=None, eta=None,
                               sdp=None, hilos=None):
    """
    Throughput frente a T a ROT fijo: E[ρ] de cada estimador no decrece con
    T (dentro de 2 errores estándar) y cada PBCE supera a LS en todo T.
    """
    resultado = _experimento_tendencia('tendencia_throughput', [rot], valores_t, ensayos, semilla,
                                       estimadores, escenario, eta, sdp, hilos)
    agregado = resultado['agregado']
    punto = agregado[agregado['rot_db'] == float(rot)]

    filas = []
    for estimador, grupo in punto.groupby('estimador', sort=True):
        grupo = grupo.sort_values('T')
        for (_, previa), (_, siguiente) in zip(grupo.iloc[:-1].iterrows(), grupo.iloc[1:].iterrows()):
            filas.append({'comprobacion': 'no_decreciente', 'estimador': estimador,
                          'T': int(siguiente['T']), 'referencia': previa['rho'],
                          'rho': siguiente['rho'],
                          'cumple': comparar_medias(previa['rho'], previa['rho_ee'],
                                                    siguiente['rho'], siguiente['rho_ee'],
                                                    'tolerante')})
    ls = punto[punto['estimador'] == 'LS'].set_index('T')
    for _, fila in punto[punto['estimador'].str.startswith('PBCE')].iterrows():
        if fila['T'] not in ls.index:
            continue
        filas.append({'comprobacion': 'supera_ls', 'estimador': fila['estimador'],
                      'T': int(fila['T']), 'referencia': ls.at[fila['T'], 'rho'],
                      'rho': fila['rho'],
                      'cumple': comparar_medias(ls.at[fila['T'], 'rho'], ls.at[fila['T'], 'rho_ee'],
                                                fila['rho'], fila['rho_ee'], 'media')})
    tabla = pd.DataFrame(filas, columns=['comprobacion', 'estimador', 'T', 'referencia', 'rho',
                                         'cumple'])
    aprobada = bool(len(tabla) and tabla['cumple'].all())
    return {'suite': 'throughput-trend', 'aprobada': aprobada, 'detalles': tabla,
            'agregado': agregado, 'etas': resultado['etas']}


def ejecutar_suite(nombre, **parametros):
    """
    Ejecuta una batería por nombre.

    Returns:
        dict: suite, aprobada, detalles (DataFrame), tiempo_s
    """
    suites = {
        'mse-analysis': suite_analisis_mse,
        'appendix': suite_varianza_producto,
        'recovery': suite_recuperacion,
        'rate': suite_tasas,
        'mse-trend': suite_tendencia_mse,
        'throughput-trend': suite_tendencia_throughput,
    }
    if nombre not in suites:
        raise ErrorArgumentoInvalido(f"Batería '{nombre}' no reconocida; opciones: {', '.join(SUITES)}")
    inicio = time.perf_counter()
    resultado = suites[nombre](**parametros)
    resultado['tiempo_s'] = time.perf_counter() - inicio
    logger.info("Batería %s: %s en %.1f s", nombre,
                "aprobada" if resultado['aprobada'] else "NO aprobada", resultado['tiempo_s'])
    return resultado
