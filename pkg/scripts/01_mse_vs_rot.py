"""
MSE y tasas frente al ROT

Este script:
1. Ejecuta el plan planes/mse_vs_rot.json (T = 2 y T = 4)
2. Compara cada PBCE con LS por punto (ROT, T) y marca las diferencias
   significativas (±2 errores estándar)
3. Emite las especificaciones JSON de las gráficas y las dibuja en PNG
"""

import dataclasses
import os
import sys
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd

# Agregar rutas para importar módulos
sys.path.append(str(Path(__file__).parent.parent))

from configuracion.config import (
    RUTA_PLANES,
    RUTA_REPORTES,
    RUTA_VISUALIZACIONES,
    asegurar_directorios,
    configurar_registro,
)
from estimador_interferencia.experimento import cargar_plan, ejecutar_experimento
from estimador_interferencia.estadisticas import diferencia_significativa
from estimador_interferencia.graficas import emitir_graficas, renderizar_graficas

RUTA_REPORTES_MSE = RUTA_REPORTES / "01_mse_vs_rot"
RUTA_VISUALIZACIONES_MSE = RUTA_VISUALIZACIONES / "01_mse_vs_rot"


def comparar_con_ls(agregado):
    """
    Ganancia de cada PBCE sobre LS por (T, ROT).

    Returns:
        pandas.DataFrame: estimador, T, rot_db, mse, mse_ls, ganancia_db, significativa
    """
    ls = agregado[agregado['estimador'] == 'LS'].set_index(['T', 'rot_db'])
    filas = []
    for _, fila in agregado[agregado['estimador'] != 'LS'].iterrows():
        clave = (fila['T'], fila['rot_db'])
        if clave not in ls.index:
            continue
        referencia = ls.loc[clave]
        filas.append({
            'estimador': fila['estimador'],
            'T': fila['T'],
            'rot_db': fila['rot_db'],
            'mse': fila['mse'],
            'mse_ls': referencia['mse'],
            'ganancia_db': 10 * np.log10(referencia['mse'] / fila['mse']),
            'significativa': diferencia_significativa(fila['mse'], fila['mse_ee'],
                                                      referencia['mse'], referencia['mse_ee']),
        })
    return pd.DataFrame(filas)


def ejecutar(ensayos=None):
    plan = cargar_plan(RUTA_PLANES / "mse_vs_rot.json")
    if ensayos is not None:
        plan = dataclasses.replace(plan, ensayos=int(ensayos))

    print("\n" + "=" * 80)
    print(f"MSE VS ROT: {plan.ensayos} ensayos, T = {plan.valores_t}, ROT = {plan.rot_db}")
    print("=" * 80)

    resultado = ejecutar_experimento(plan, salida=RUTA_REPORTES_MSE)
    comparacion = comparar_con_ls(resultado['agregado'])
    if not comparacion.empty:
        print("\n" + comparacion.to_string(index=False))
        timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
        archivo = RUTA_REPORTES_MSE / f"comparacion_ls_{timestamp}.csv"
        comparacion.to_csv(archivo, index=False)
        print(f"\n✓ Comparación guardada: {archivo.name}")

    rutas = emitir_graficas(RUTA_REPORTES_MSE, RUTA_VISUALIZACIONES_MSE)
    pngs = renderizar_graficas(rutas)
    print(f"✓ {len(pngs)} gráficas en {RUTA_VISUALIZACIONES_MSE}")

    if resultado['n_errores']:
        print(f"\n[ADVERTENCIA] {resultado['n_errores']} filas con error de estimador")
    return resultado


# ============================================================================
# EJECUCIÓN PRINCIPAL
# ============================================================================

if __name__ == "__main__":
    configurar_registro()
    asegurar_directorios(RUTA_REPORTES_MSE, RUTA_VISUALIZACIONES_MSE)

    if os.environ.get('ANALISIS_AUTOMATICO') == '1':
        # Modo automático: número de ensayos del plan
        print("\nModo automático: ejecutando el plan completo\n")
        ejecutar()
    else:
        respuesta = input("Número de ensayos (ENTER = el del plan): ").strip()
        ejecutar(int(respuesta) if respuesta else None)

    print("\n" + "=" * 80)
    print("MSE VS ROT COMPLETADO")
    print("=" * 80)
    print(f"\nReportes generados en: {RUTA_REPORTES_MSE}")
