"""
Orquestación de experimentos de Monte-Carlo.

Para cada ensayo se sortean rayos y canal del usuario, se generan T
muestras por ROT y se ejecuta cada estimador; se registran MSE, fórmulas
cerradas y tasas. Los CSV son reproducibles bit a bit dada la semilla.

Flujos del generador por ensayo k (SeedSequence(semilla, spawn_key=(k,))):
rayos, símbolos/ruido, canal del usuario, agrupamiento.
"""

import dataclasses
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.optimize import linear_sum_assignment
from tqdm import tqdm

from configuracion.config import (
    ESTIMADORES_VALIDOS,
    ETA_DEFAULT,
    PASO_DELTA,
    ENSAYOS_DEFAULT,
    REJILLA_ETA,
    T0_DEFAULT,
    N_REJILLA_MUSIC,
    DIGITOS_CSV,
    RUTA_RESULTADOS,
    asegurar_directorios,
    obtener_hilos,
)
from .covarianza import (
    estimacion_ls,
    reconstruccion_pbce,
    error_cuadratico,
    gamma_ls,
    gamma_pbce,
)
from .enlace import EnlaceRealizacion, reporte_tasa, aplicar_piso_ruido, throughput, optimizar_delta
from .errores import ErrorConfiguracion, ErrorEstimador, ErrorArgumentoInvalido
from .escenario import (
    ConfigEscenario,
    config_desde_dict,
    cargar_config,
    sortear_rayos,
    sortear_canal_usuario,
    generar_muestras,
    covarianza_interferencia,
    covarianza_verdadera,
    base_de_rayos,
    ruido_para_rot,
    LoteMuestras,
)
from .estadisticas import agregar_ensayos
from .estimadores_angulo import estimacion_sge, estimacion_music, estimacion_gec
from .sin_rejilla import ConfigSdp, estimacion_gae
from .tipos import EstimacionFases, ID, distancia_circular

logger = logging.getLogger(__name__)

FORMATO_FLOTANTE = f'%.{DIGITOS_CSV}g'

# Nombres del documento JSON del plan -> atributo de PlanExperimento
CAMPOS_PLAN = {
    'scenario': 'escenario',
    'rot_db': 'rot_db',
    'T': 'valores_t',
    'estimators': 'estimadores',
    'trials': 'ensayos',
    'delta_step': 'paso_delta',
    'output_dir': 'salida',
    'fixed_rays': 'rayos_fijos',
    'seed': 'semilla',
    'eta': 'eta',
    'calibration_draws': 'sorteos_calibracion',
    'T0': 'tamano_ventana',
    'music_grid': 'n_rejilla',
    'sdp': 'sdp',
    'noise_floor_rates': 'piso_ruido_tasa',
}

CLAVES_SDP = ('epsilon', 'max_iter', 'solver', 'rho', 'tol_residuo')

# Estimadores que resuelven el SDP (dependen de η)
ESTIMADORES_SDP = ('PBCE-GAE', 'PBCE-SGE', 'PBCE-GEC')

COLUMNAS_ENSAYOS = ['ensayo', 'estimador', 'T', 'rot_db', 'sigma2', 'mse', 'gamma_ls',
                    'gamma_pbce', 'C', 'C_est', 'C_opt', 'rho', 'delta', 'iteraciones', 'error']
COLUMNAS_TIEMPOS = ['ensayo', 'estimador', 'T', 'rot_db', 'tiempo_ms']
METRICAS_AGREGADAS = ['mse', 'gamma_ls', 'gamma_pbce', 'C', 'C_est', 'C_opt', 'rho', 'iteraciones']


# ============================================================================
# PLAN DEL EXPERIMENTO
# ============================================================================

@dataclass
class PlanExperimento:
    """
    Barridos y parámetros de un experimento.

    eta None calibra η por ROT sobre REJILLA_ETA cuando hay estimadores que
    resuelven el SDP.
    """
    escenario: ConfigEscenario = field(default_factory=ConfigEscenario)
    rot_db: list = field(default_factory=lambda: [0.0])
    valores_t: list = field(default_factory=lambda: [2])
    estimadores: list = field(default_factory=lambda: list(ESTIMADORES_VALIDOS))
    ensayos: int = ENSAYOS_DEFAULT
    paso_delta: float = PASO_DELTA
    salida: Path = RUTA_RESULTADOS
    rayos_fijos: bool = False
    semilla: int = None
    eta: float = None
    sorteos_calibracion: int = 3
    tamano_ventana: int = T0_DEFAULT
    n_rejilla: int = N_REJILLA_MUSIC
    sdp: dict = field(default_factory=dict)
    piso_ruido_tasa: bool = True

    def __post_init__(self):
        if isinstance(self.escenario, dict):
            self.escenario = config_desde_dict(self.escenario)
        elif isinstance(self.escenario, (str, Path)):
            self.escenario = cargar_config(self.escenario)
        if self.semilla is None:
            self.semilla = self.escenario.semilla
        self.salida = Path(self.salida)
        self.rot_db = [float(r) for r in self.rot_db]
        self.valores_t = [int(t) for t in self.valores_t]
        self.estimadores = list(self.estimadores)
        validar_plan(self)

    def config_sdp(self, eta):
        return ConfigSdp(eta=eta, **self.sdp)

    def a_dict(self):
        documento = {clave: getattr(self, atributo) for clave, atributo in CAMPOS_PLAN.items()}
        documento['scenario'] = self.escenario.a_dict()
        documento['output_dir'] = str(self.salida)
        return documento


def validar_plan(plan):
    """
    Raises:
        ErrorConfiguracion: Si el plan viola alguna invariante
    """
    if int(plan.ensayos) != plan.ensayos or plan.ensayos < 1:
        raise ErrorConfiguracion("trials debe ser un entero ≥ 1")
    if not plan.estimadores:
        raise ErrorConfiguracion("La lista de estimadores está vacía")
    desconocidos = [e for e in plan.estimadores if e not in ESTIMADORES_VALIDOS]
    if desconocidos:
        raise ErrorConfiguracion(f"Estimadores no reconocidos: {', '.join(desconocidos)}")
    if len(set(plan.estimadores)) != len(plan.estimadores):
        raise ErrorConfiguracion("Estimadores repetidos en el plan")
    if not plan.rot_db or not all(np.isfinite(plan.rot_db)):
        raise ErrorConfiguracion("Los valores de ROT deben ser finitos y al menos uno")
    if not plan.valores_t or min(plan.valores_t) < 1:
        raise ErrorConfiguracion("Los valores de T deben ser ≥ 1")
    if not 0 < plan.paso_delta <= 1:
        raise ErrorConfiguracion("delta_step debe estar en (0, 1]")
    if plan.eta is not None and not 0 < plan.eta < 1:
        raise ErrorConfiguracion("eta debe estar en (0, 1)")
    if plan.tamano_ventana < 1:
        raise ErrorConfiguracion("T0 debe ser ≥ 1")
    if plan.sorteos_calibracion < 1:
        raise ErrorConfiguracion("calibration_draws debe ser ≥ 1")
    desconocidas = sorted(set(plan.sdp) - set(CLAVES_SDP))
    if desconocidas:
        raise ErrorConfiguracion(f"Claves desconocidas en sdp: {', '.join(desconocidas)}")
    try:
        plan.config_sdp(plan.eta if plan.eta is not None else REJILLA_ETA[0])
    except ErrorArgumentoInvalido as e:
        raise ErrorConfiguracion(f"Parámetros del SDP inválidos: {e}")
    cfg = plan.escenario
    if {'PBCE-SGE', 'PBCE-MUSIC'} & set(plan.estimadores) and cfg.n_fuentes >= cfg.n_antenas:
        raise ErrorConfiguracion(
            f"SGE y MUSIC requieren S = L·N_g < N (S={cfg.n_fuentes}, N={cfg.n_antenas})")
    if 'PBCE-MUSIC' in plan.estimadores and plan.n_rejilla < 2 * cfg.n_fuentes:
        raise ErrorConfiguracion("music_grid debe ser ≥ 2S")


def plan_desde_dict(documento, base=None):
    """
    Crea el plan desde un documento JSON decodificado.

    Args:
        documento (dict): Plan
        base (Path): Carpeta para resolver rutas relativas (escenario y salida)
    """
    desconocidas = sorted(set(documento) - set(CAMPOS_PLAN))
    if desconocidas:
        raise ErrorConfiguracion(f"Claves desconocidas en el plan: {', '.join(desconocidas)}")
    argumentos = {CAMPOS_PLAN[clave]: valor for clave, valor in documento.items()}
    escenario = argumentos.get('escenario')
    if isinstance(escenario, str) and base is not None and not Path(escenario).is_absolute():
        argumentos['escenario'] = Path(base) / escenario
    salida = argumentos.get('salida')
    if salida is not None and base is not None and not Path(salida).is_absolute():
        argumentos['salida'] = Path(base) / salida
    try:
        return PlanExperimento(**argumentos)
    except TypeError as e:
        raise ErrorConfiguracion(f"Plan inválido: {e}")


def cargar_plan(ruta):
    """Lee un plan de experimento desde JSON."""
    ruta = Path(ruta)
    try:
        with open(ruta, 'r', encoding='utf-8') as f:
            documento = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ErrorConfiguracion(f"No se pudo leer el plan {ruta}: {e}")
    return plan_desde_dict(documento, base=ruta.parent)


# ============================================================================
# GENERADORES
# ============================================================================

def generadores_ensayo(semilla, ensayo):
    """Flujos independientes del ensayo: rayos, muestras, usuario, agrupamiento."""
    secuencia = np.random.SeedSequence(semilla, spawn_key=(ensayo,))
    return [np.random.default_rng(s) for s in secuencia.spawn(4)]


def generador_rayos_fijos(semilla):
    return np.random.default_rng(np.random.SeedSequence(semilla))


def error_fases(estimadas, verdaderas, maximo=False):
    """
    Distancia circular tras emparejar por asignación óptima: la media, o
    la peor pareja con maximo=True.
    """
    estimadas = np.asarray(estimadas, dtype=float)
    verdaderas = np.asarray(verdaderas, dtype=float)
    if verdaderas.size == 0:
        return 0.0
    costo = distancia_circular(estimadas[:, None], verdaderas[None, :])
    filas, columnas = linear_sum_assignment(costo)
    emparejadas = costo[filas, columnas]
    return float(np.max(emparejadas) if maximo else np.mean(emparejadas))


# ============================================================================
# CALIBRACIÓN DE η
# ============================================================================

def calibrar_eta(plan, rot):
    """
    Elige η en REJILLA_ETA minimizando el error medio de desfases de GAE
    sobre sorteos sintéticos al ROT dado (T = menor T del plan).

    Returns:
        tuple: (η elegido, dict η -> error medio)
    """
    cfg = plan.escenario
    n_muestras = min(plan.valores_t)
    errores = {}
    sorteos = []
    for d in range(plan.sorteos_calibracion):
        # Flujo separado de los ensayos (spawn_key con dos componentes)
        secuencia = np.random.SeedSequence(plan.semilla, spawn_key=(2 ** 32 - 1, d))
        rng_rayos, rng_muestras = [np.random.default_rng(s) for s in secuencia.spawn(2)]
        rayos = sortear_rayos(cfg, rng_rayos)
        r_int = covarianza_interferencia(rayos, cfg)
        try:
            sigma2 = ruido_para_rot(r_int, rot)
        except ErrorArgumentoInvalido:
            sigma2 = cfg.potencia_ruido
        cfg_rot = dataclasses.replace(cfg, potencia_ruido=sigma2)
        lote = generar_muestras(rayos, cfg_rot, n_muestras, rng_muestras)
        sorteos.append((lote, rayos.fases_recepcion()))

    for eta in REJILLA_ETA:
        config = plan.config_sdp(eta)
        valores = []
        for lote, verdaderas in sorteos:
            try:
                estimadas = estimacion_gae(lote, config, cfg.n_fuentes)
                valores.append(error_fases(estimadas.valores, verdaderas))
            except ErrorEstimador:
                valores.append(np.inf)
        errores[eta] = float(np.mean(valores))
    eta_elegido = min(REJILLA_ETA, key=lambda e: errores[e])
    logger.info("η calibrado para ROT=%.1f dB: %.1f", rot, eta_elegido)
    return eta_elegido, errores


# ============================================================================
# ENSAYO
# ============================================================================

def _estimar(estimador, plan, lote, ls, sigma2, rayos, config, rng_agrupamiento):
    """Devuelve (EstimacionCovarianza, iteraciones del solver)."""
    cfg = plan.escenario
    s = cfg.n_fuentes
    if estimador == 'LS':
        return ls, 0
    if estimador == 'PBCE-ID':
        fases = EstimacionFases(rayos.fases_recepcion(), ID)
    elif estimador == 'PBCE-GAE':
        fases = estimacion_gae(lote, config, s)
    elif estimador == 'PBCE-SGE':
        fases = estimacion_sge(ls, sigma2, s, config)
    elif estimador == 'PBCE-GEC':
        fases = estimacion_gec(lote, s, config, plan.tamano_ventana, rng_agrupamiento)
    elif estimador == 'PBCE-MUSIC':
        fases = estimacion_music(ls, sigma2, s, plan.n_rejilla)
    else:
        raise ErrorConfiguracion(f"Estimador '{estimador}' no reconocido")
    iteraciones = int(fases.diagnosticos.get('iteraciones', 0))
    return reconstruccion_pbce(ls, fases, sigma2), iteraciones


def ejecutar_ensayo(plan, ensayo, etas, rayos_fijos=None):
    """
    Ejecuta un ensayo completo (todas las combinaciones ROT × T × estimador).

    δ y ρ se completan después, al optimizar δ sobre el ensamble.

    Returns:
        tuple: (filas, tiempos) como listas de dicts
    """
    cfg = plan.escenario
    rng_rayos, rng_muestras, rng_usuario, rng_agrupamiento = generadores_ensayo(plan.semilla, ensayo)
    rayos = rayos_fijos if rayos_fijos is not None else sortear_rayos(cfg, rng_rayos)
    canal = sortear_canal_usuario(cfg, rng_usuario)
    r_int = covarianza_interferencia(rayos, cfg)
    base = base_de_rayos(rayos, cfg.n_antenas)

    # Símbolos y ruido unitario se sortean una vez; cada ROT escala el ruido
    unitario = generar_muestras(rayos, dataclasses.replace(cfg, potencia_ruido=1.0),
                                max(plan.valores_t), rng_muestras)

    filas, tiempos = [], []
    for rot in plan.rot_db:
        try:
            sigma2 = ruido_para_rot(r_int, rot)
        except ErrorArgumentoInvalido:
            # Sin interferencia el ROT no se puede fijar; se usa σ² del escenario
            sigma2 = cfg.potencia_ruido
        verdadera = covarianza_verdadera(rayos, cfg, sigma2)
        muestras = unitario.interferencia + np.sqrt(sigma2) * unitario.ruido

        for n_muestras in plan.valores_t:
            lote = LoteMuestras(muestras[:n_muestras])
            ls = estimacion_ls(lote)
            g_ls = gamma_ls(verdadera, n_muestras)
            try:
                g_pbce = gamma_pbce(verdadera, base, sigma2, n_muestras)
            except ErrorEstimador:
                g_pbce = np.nan

            for estimador in plan.estimadores:
                config = plan.config_sdp(etas.get(rot) or ETA_DEFAULT)
                fila = {'ensayo': ensayo, 'estimador': estimador, 'T': n_muestras,
                        'rot_db': rot, 'sigma2': sigma2, 'gamma_ls': g_ls, 'gamma_pbce': g_pbce,
                        'mse': np.nan, 'C': np.nan, 'C_est': np.nan, 'C_opt': np.nan,
                        'rho': np.nan, 'delta': np.nan, 'iteraciones': 0, 'error': ''}
                inicio = time.perf_counter()
                try:
                    estimada, iteraciones = _estimar(estimador, plan, lote, ls, sigma2, rayos,
                                                     config, rng_agrupamiento)
                    fila['mse'] = error_cuadratico(estimada, verdadera)
                    fila['iteraciones'] = iteraciones
                    para_tasa = aplicar_piso_ruido(estimada, sigma2) if plan.piso_ruido_tasa else estimada
                    reporte = reporte_tasa(
                        EnlaceRealizacion(canal, cfg.potencia_usuario, para_tasa, verdadera), 1.0)
                    fila['C'], fila['C_est'], fila['C_opt'] = reporte.c, reporte.c_est, reporte.c_opt
                except ErrorEstimador as e:
                    fila['error'] = type(e).__name__
                    logger.warning("Ensayo %d, %s (T=%d, ROT=%.1f): %s", ensayo, estimador,
                                   n_muestras, rot, e)
                tiempos.append({'ensayo': ensayo, 'estimador': estimador, 'T': n_muestras,
                                'rot_db': rot, 'tiempo_ms': (time.perf_counter() - inicio) * 1e3})
                filas.append(fila)
    return filas, tiempos


# ============================================================================
# EXPERIMENTO COMPLETO
# ============================================================================

def completar_throughput(df, paso_delta):
    """
    Elige δ* por (estimador, T, ROT) sobre los ensayos sin error y completa
    las columnas delta y rho.
    """
    df = df.copy()
    for _, grupo in df[df['error'] == ''].groupby(['estimador', 'T', 'rot_db'], sort=True):
        delta, _ = optimizar_delta(grupo['C'].to_numpy(), grupo['C_est'].to_numpy(), paso_delta)
        df.loc[grupo.index, 'delta'] = delta
        df.loc[grupo.index, 'rho'] = throughput(delta, grupo['C'].to_numpy(), grupo['C_est'].to_numpy())
    return df


def agregar_resultados(df):
    """Medias ± error estándar por (estimador, T, ROT) y conteo de errores."""
    validos = df[df['error'] == '']
    agregado = agregar_ensayos(validos, ['estimador', 'T', 'rot_db'], METRICAS_AGREGADAS)
    deltas = validos.groupby(['estimador', 'T', 'rot_db'], sort=True)['delta'].first()
    agregado['delta'] = [deltas.get((e, t, r), np.nan) for e, t, r in
                         zip(agregado['estimador'], agregado['T'], agregado['rot_db'])]
    errores = df[df['error'] != ''].groupby(['estimador', 'T', 'rot_db']).size()
    agregado['n_errores'] = [int(errores.get((e, t, r), 0)) for e, t, r in
                             zip(agregado['estimador'], agregado['T'], agregado['rot_db'])]
    return agregado


def ejecutar_experimento(plan, hilos=None, salida=None, mostrar_progreso=True):
    """
    Ejecuta el plan y escribe ensayos.csv, agregado.csv, tiempos.csv y
    metadatos.json en la carpeta de salida.

    Args:
        plan (PlanExperimento): Plan validado
        hilos (int): Hilos para los ensayos (ESTIMADOR_HILOS si None)
        salida (Path): Carpeta de salida (la del plan si None)
        mostrar_progreso (bool): Barra de progreso tqdm

    Returns:
        dict: ensayos, agregado (DataFrames), n_errores, rutas, etas
    """
    salida = Path(salida) if salida is not None else plan.salida
    asegurar_directorios(salida)
    hilos = obtener_hilos(1) if hilos is None else max(1, int(hilos))
    logger.info("Experimento: %d ensayos, %d hilos, salida %s", plan.ensayos, hilos, salida)

    etas, curvas_eta = {}, {}
    if plan.eta is None and set(ESTIMADORES_SDP) & set(plan.estimadores) and plan.escenario.n_fuentes:
        for rot in plan.rot_db:
            etas[rot], curvas_eta[rot] = calibrar_eta(plan, rot)
    else:
        etas = {rot: plan.eta for rot in plan.rot_db}

    rayos_fijos = None
    if plan.rayos_fijos:
        rayos_fijos = sortear_rayos(plan.escenario, generador_rayos_fijos(plan.semilla))

    resultados = [None] * plan.ensayos
    with tqdm(total=plan.ensayos, desc="Ensayos", disable=not mostrar_progreso) as barra:
        if hilos == 1:
            for k in range(plan.ensayos):
                resultados[k] = ejecutar_ensayo(plan, k, etas, rayos_fijos)
                barra.update(1)
        else:
            with ThreadPoolExecutor(max_workers=hilos) as ejecutor:
                futuros = {ejecutor.submit(ejecutar_ensayo, plan, k, etas, rayos_fijos): k
                           for k in range(plan.ensayos)}
                for futuro in futuros:
                    resultados[futuros[futuro]] = futuro.result()
                    barra.update(1)

    filas = [fila for filas_k, _ in resultados for fila in filas_k]
    tiempos = [t for _, tiempos_k in resultados for t in tiempos_k]
    df = completar_throughput(pd.DataFrame(filas, columns=COLUMNAS_ENSAYOS), plan.paso_delta)
    agregado = agregar_resultados(df)
    n_errores = int((df['error'] != '').sum())

    rutas = {
        'ensayos': salida / "ensayos.csv",
        'agregado': salida / "agregado.csv",
        'tiempos': salida / "tiempos.csv",
        'metadatos': salida / "metadatos.json",
    }
    df.to_csv(rutas['ensayos'], index=False, float_format=FORMATO_FLOTANTE)
    agregado.to_csv(rutas['agregado'], index=False, float_format=FORMATO_FLOTANTE)
    pd.DataFrame(tiempos, columns=COLUMNAS_TIEMPOS).to_csv(rutas['tiempos'], index=False,
                                                           float_format=FORMATO_FLOTANTE)
    metadatos = {
        'plan': plan.a_dict(),
        'eta': {str(rot): eta for rot, eta in etas.items()},
        'calibracion_eta': {str(rot): {str(e): v for e, v in curva.items()}
                            for rot, curva in curvas_eta.items()},
        'seleccion_atomos': 'mayor_potencia',
        'piso_ruido_tasa': plan.piso_ruido_tasa,
        'n_errores': n_errores,
        'columnas_ensayos': COLUMNAS_ENSAYOS,
    }
    with open(rutas['metadatos'], 'w', encoding='utf-8') as f:
        json.dump(metadatos, f, indent=2, ensure_ascii=False, default=str)

    logger.info("Experimento terminado: %d filas, %d errores", len(df), n_errores)
    return {'ensayos': df, 'agregado': agregado, 'n_errores': n_errores,
            'rutas': rutas, 'etas': etas}
