"""
Descripciones declarativas de gráficas (JSON) a partir del CSV agregado y
su representación con matplotlib.

Esquema de cada archivo <nombre>.json:

    {
      "nombre": str, "titulo": str,
      "eje_x": {"etiqueta": str, "escala": "lineal" | "log"},
      "eje_y": {"etiqueta": str, "escala": "lineal" | "log"},
      "series": [
        {"etiqueta": str, "tipo": "empirica" | "analitica",
         "estilo": "solida" | "discontinua",
         "x": [float], "y": [float], "yerr": [float] | null}
      ]
    }

Los valores no finitos se escriben como null.
"""

import json
import logging
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns

from configuracion.config import DPI_GRAFICAS, FIGSIZE_DEFAULT
from .complejidad import tabla_complejidad
from .errores import ErrorEsquema

logger = logging.getLogger(__name__)

# Configurar estilo de gráficas
sns.set_style("whitegrid")
plt.rcParams['figure.dpi'] = DPI_GRAFICAS
plt.rcParams['font.size'] = 10

COLUMNAS_REQUERIDAS = ['estimador', 'T', 'rot_db', 'mse', 'mse_ee', 'gamma_ls', 'gamma_pbce',
                       'C', 'C_ee', 'C_opt', 'rho', 'rho_ee']

COLORES_ESTIMADOR = {
    'LS': '#e74c3c',
    'PBCE-GAE': '#3498db',
    'PBCE-SGE': '#2ecc71',
    'PBCE-GEC': '#9b59b6',
    'PBCE-MUSIC': '#f39c12',
    'PBCE-ID': '#34495e',
}

ESTILOS_LINEA = {'solida': '-', 'discontinua': '--'}


def _lista(valores):
    return [float(v) if np.isfinite(v) else None for v in np.asarray(valores, dtype=float)]


def _serie(etiqueta, x, y, yerr=None, tipo='empirica', estilo='solida'):
    return {
        'etiqueta': etiqueta,
        'tipo': tipo,
        'estilo': estilo,
        'x': _lista(x),
        'y': _lista(y),
        'yerr': _lista(yerr) if yerr is not None else None,
    }


def _especificacion(nombre, titulo, eje_x, eje_y, series, escala_x='lineal', escala_y='lineal'):
    return {
        'nombre': nombre,
        'titulo': titulo,
        'eje_x': {'etiqueta': eje_x, 'escala': escala_x},
        'eje_y': {'etiqueta': eje_y, 'escala': escala_y},
        'series': series,
    }


# ============================================================================
# CONSTRUCCIÓN DE ESPECIFICACIONES
# ============================================================================

def _por_estimador(df, x, y):
    """Una serie empírica por estimador, ordenada por x."""
    series = []
    for estimador, grupo in df.groupby('estimador', sort=True):
        grupo = grupo.sort_values(x)
        yerr = grupo[f'{y}_ee'] if f'{y}_ee' in grupo else None
        series.append(_serie(estimador, grupo[x], grupo[y], yerr))
    return series


def _referencia(df, x, y):
    """Valor por x de una columna común a todos los estimadores."""
    return df.groupby(x, sort=True)[y].mean()


def especificaciones_desde_agregado(agregado, metadatos=None):
    """
    Construye todas las especificaciones a partir del agregado.

    Args:
        agregado (pandas.DataFrame): Salida de agregar_resultados
        metadatos (dict): metadatos.json (para la tabla de complejidad)

    Returns:
        list: Especificaciones (dicts)

    Raises:
        ErrorEsquema: Si faltan columnas
    """
    faltantes = [c for c in COLUMNAS_REQUERIDAS if c not in agregado.columns]
    if faltantes:
        raise ErrorEsquema(f"El agregado no tiene las columnas: {', '.join(faltantes)}")
    if agregado.empty:
        return []

    especificaciones = []
    for t, por_t in agregado.groupby('T', sort=True):
        series = _por_estimador(por_t, 'rot_db', 'mse')
        g_ls = _referencia(por_t, 'rot_db', 'gamma_ls')
        g_pbce = _referencia(por_t, 'rot_db', 'gamma_pbce')
        series.append(_serie('Γ_LS', g_ls.index, g_ls.values, tipo='analitica', estilo='discontinua'))
        series.append(_serie('Γ_PBCE', g_pbce.index, g_pbce.values, tipo='analitica',
                             estilo='discontinua'))
        especificaciones.append(_especificacion(
            f'mse_vs_rot_T{t}', f'MSE vs ROT (T = {t})', 'ROT [dB]', 'MSE', series,
            escala_y='log'))

        series = _por_estimador(por_t, 'rot_db', 'C')
        c_opt = _referencia(por_t, 'rot_db', 'C_opt')
        series.append(_serie('C_opt', c_opt.index, c_opt.values, tipo='analitica',
                             estilo='discontinua'))
        especificaciones.append(_especificacion(
            f'tasa_vs_rot_T{t}', f'Tasa alcanzable vs ROT (T = {t})', 'ROT [dB]',
            'C [bit/s/Hz]', series))

        especificaciones.append(_especificacion(
            f'throughput_vs_rot_T{t}', f'Throughput vs ROT (T = {t})', 'ROT [dB]',
            'ρ [bit/s/Hz]', _por_estimador(por_t, 'rot_db', 'rho')))

    for rot, por_rot in agregado.groupby('rot_db', sort=True):
        especificaciones.append(_especificacion(
            f'throughput_vs_T_rot{rot:g}', f'Throughput vs T (ROT = {rot:g} dB)', 'T',
            'ρ [bit/s/Hz]', _por_estimador(por_rot, 'T', 'rho')))

    escenario = (metadatos or {}).get('plan', {}).get('scenario')
    if escenario:
        n = escenario['n_bs_antennas']
        s = escenario['n_interferers'] * escenario['n_rays']
        valores_t = sorted(agregado['T'].unique())
        metodos = [e.replace('PBCE-', '') for e in sorted(agregado['estimador'].unique())
                   if e != 'PBCE-ID']
        tabla = tabla_complejidad(n, valores_t, s, metodos)
        series = [_serie(m, g['T'], g['operaciones'], tipo='analitica')
                  for m, g in tabla.groupby('estimador', sort=True)]
        especificaciones.append(_especificacion(
            'complejidad_vs_T', f'Operaciones vs T (N = {n}, S = {s})', 'T', 'Operaciones',
            series, escala_y='log'))
    return especificaciones


def emitir_graficas(carpeta_entrada, carpeta_salida=None):
    """
    Escribe una especificación JSON por figura a partir de agregado.csv.

    Args:
        carpeta_entrada (Path): Carpeta con agregado.csv (y metadatos.json)
        carpeta_salida (Path): Destino; por defecto <entrada>/graficas

    Returns:
        list: Rutas escritas (vacía si el agregado no tiene estimadores)
    """
    carpeta_entrada = Path(carpeta_entrada)
    ruta_agregado = carpeta_entrada / "agregado.csv"
    if not ruta_agregado.exists():
        raise ErrorEsquema(f"No existe {ruta_agregado}")
    agregado = pd.read_csv(ruta_agregado)

    metadatos = None
    ruta_metadatos = carpeta_entrada / "metadatos.json"
    if ruta_metadatos.exists():
        with open(ruta_metadatos, 'r', encoding='utf-8') as f:
            metadatos = json.load(f)

    especificaciones = especificaciones_desde_agregado(agregado, metadatos)
    if not especificaciones:
        logger.warning("El agregado no contiene estimadores; no se emiten gráficas")
        return []

    carpeta_salida = Path(carpeta_salida) if carpeta_salida else carpeta_entrada / "graficas"
    carpeta_salida.mkdir(exist_ok=True, parents=True)
    rutas = []
    for especificacion in especificaciones:
        ruta = carpeta_salida / f"{especificacion['nombre']}.json"
        with open(ruta, 'w', encoding='utf-8') as f:
            json.dump(especificacion, f, indent=2, ensure_ascii=False)
        rutas.append(ruta)
    logger.info("%d especificaciones escritas en %s", len(rutas), carpeta_salida)
    return rutas


# ============================================================================
# REPRESENTACIÓN
# ============================================================================

def graficar_especificacion(especificacion, archivo_salida=None):
    """
    Dibuja una especificación con matplotlib.

    Args:
        especificacion (dict o Path): Especificación o ruta al JSON
        archivo_salida (Path): PNG de salida (opcional)
    """
    if not isinstance(especificacion, dict):
        with open(especificacion, 'r', encoding='utf-8') as f:
            especificacion = json.load(f)

    fig, ax = plt.subplots(figsize=FIGSIZE_DEFAULT)
    for serie in especificacion['series']:
        x = np.array([np.nan if v is None else v for v in serie['x']], dtype=float)
        y = np.array([np.nan if v is None else v for v in serie['y']], dtype=float)
        estilo = ESTILOS_LINEA.get(serie.get('estilo'), '-')
        color = COLORES_ESTIMADOR.get(serie['etiqueta'])
        if serie.get('yerr'):
            yerr = np.array([np.nan if v is None else v for v in serie['yerr']], dtype=float)
            ax.errorbar(x, y, yerr=yerr, linestyle=estilo, marker='o', color=color,
                        capsize=3, label=serie['etiqueta'])
        else:
            ax.plot(x, y, linestyle=estilo, marker='o' if serie['tipo'] == 'empirica' else None,
                    color=color, label=serie['etiqueta'])

    ax.set_xlabel(especificacion['eje_x']['etiqueta'])
    ax.set_ylabel(especificacion['eje_y']['etiqueta'])
    if especificacion['eje_x']['escala'] == 'log':
        ax.set_xscale('log')
    if especificacion['eje_y']['escala'] == 'log':
        ax.set_yscale('log')
    ax.set_title(especificacion['titulo'])
    ax.legend()
    ax.grid(True, alpha=0.3)

    plt.tight_layout()

    if archivo_salida:
        plt.savefig(archivo_salida, dpi=DPI_GRAFICAS, bbox_inches='tight')
    plt.close(fig)


def renderizar_graficas(rutas_especificaciones, carpeta_salida=None):
    """
    Genera un PNG por especificación JSON.

    Returns:
        list: Rutas de los PNG
    """
    pngs = []
    for ruta in rutas_especificaciones:
        ruta = Path(ruta)
        destino = (Path(carpeta_salida) if carpeta_salida else ruta.parent) / f"{ruta.stem}.png"
        graficar_especificacion(ruta, destino)
        pngs.append(destino)
    return pngs
