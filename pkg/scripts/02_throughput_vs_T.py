"""
Throughput frente al número de muestras T

Este script:
1. Ejecuta el plan planes/throughput_vs_T.json (ROT de 0 dB, T de 2 a 10)
2. Reporta δ* y E[ρ] por estimador y T, junto al throughput con la
   correlación verdadera (C_opt)
3. Emite las especificaciones JSON de las gráficas y las dibuja en PNG
"""

import dataclasses
import os
import sys
from pathlib import Path

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
from estimador_interferencia.graficas import emitir_graficas, renderizar_graficas

RUTA_REPORTES_THROUGHPUT = RUTA_REPORTES / "02_throughput_vs_T"
RUTA_VISUALIZACIONES_THROUGHPUT = RUTA_VISUALIZACIONES / "02_throughput_vs_T"


def resumen_throughput(agregado):
    """Tabla ancha T × estimador con E[ρ], más la columna C_opt."""
    tabla = agregado.pivot_table(index='T', columns='estimador', values='rho')
    tabla['C_opt'] = agregado.groupby('T')['C_opt'].mean()
    return tabla.sort_index()


def ejecutar(ensayos=None):
    plan = cargar_plan(RUTA_PLANES / "throughput_vs_T.json")
    if ensayos is not None:
        plan = dataclasses.replace(plan, ensayos=int(ensayos))

    print("\n" + "=" * 80)
    print(f"THROUGHPUT VS T: {plan.ensayos} ensayos, ROT = {plan.rot_db} dB")
    print("=" * 80)

    resultado = ejecutar_experimento(plan, salida=RUTA_REPORTES_THROUGHPUT)
    agregado = resultado['agregado']

    print("\nδ* por estimador y T:")
    print(agregado.pivot_table(index='T', columns='estimador', values='delta').to_string())

    tabla = resumen_throughput(agregado)
    print("\nE[ρ] [bit/s/Hz]:")
    print(tabla.to_string(float_format=lambda v: f"{v:.3f}"))
    archivo = RUTA_REPORTES_THROUGHPUT / "resumen_throughput.csv"
    tabla.to_csv(archivo)
    print(f"\n✓ Resumen guardado: {archivo.name}")

    rutas = emitir_graficas(RUTA_REPORTES_THROUGHPUT, RUTA_VISUALIZACIONES_THROUGHPUT)
    pngs = renderizar_graficas(rutas)
    print(f"✓ {len(pngs)} gráficas en {RUTA_VISUALIZACIONES_THROUGHPUT}")
    return resultado


# ============================================================================
# EJECUCIÓN PRINCIPAL
# ============================================================================

if __name__ == "__main__":
    configurar_registro()
    asegurar_directorios(RUTA_REPORTES_THROUGHPUT, RUTA_VISUALIZACIONES_THROUGHPUT)

    if os.environ.get('ANALISIS_AUTOMATICO') == '1':
        print("\nModo automático: ejecutando el plan completo\n")
        ejecutar()
    else:
        respuesta = input("Número de ensayos (ENTER = el del plan): ").strip()
        ejecutar(int(respuesta) if respuesta else None)

    print("\n" + "=" * 80)
    print("THROUGHPUT VS T COMPLETADO")
    print("=" * 80)
    print(f"\nReportes generados en: {RUTA_REPORTES_THROUGHPUT}")
