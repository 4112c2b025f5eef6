"""
Sistema de Simulación de Estimación de Interferencia

Menú principal para los estudios numéricos:
- MSE frente al ROT
- Throughput frente a T
- Baterías de validación

Con argumentos se comporta como la CLI:
    python inicio_simulacion.py run --plan planes/rapido.json --out resultados/rapido
    python inicio_simulacion.py plots --in resultados/rapido
    python inicio_simulacion.py validate --suite appendix
"""

import os
import subprocess
import sys
import time
from pathlib import Path

# Agregar rutas
sys.path.append(str(Path(__file__).parent))

from configuracion.config import (
    N_ANTENAS_BS,
    N_INTERFERENTES,
    N_RAYOS,
    ESTIMADORES_VALIDOS,
    RUTA_PLANES,
    RUTA_REPORTES,
    RUTA_VISUALIZACIONES,
)
from estimador_interferencia.linea_comandos import main as main_cli

ESTUDIOS = [
    ("MSE vs ROT", "01_mse_vs_rot.py"),
    ("Throughput vs T", "02_throughput_vs_T.py"),
    ("Baterías de validación", "03_validacion.py"),
]


def mostrar_banner():
    """Muestra el banner del sistema."""
    print("""
================================================================================
    SIMULADOR DE ESTIMACION DE INTERFERENCIA
    Correlacion espacial en canales de pocos rayos (ondas milimetricas)

    LS, PBCE (GAE, SGE, GEC, MUSIC) y throughput con blanqueo
================================================================================
    """)


def mostrar_resumen():
    """Escenario por defecto y planes disponibles."""
    print("\n" + "=" * 80)
    print("ESCENARIO POR DEFECTO")
    print("=" * 80)
    print(f"\n  N = {N_ANTENAS_BS} antenas, L = {N_INTERFERENTES} interferentes, "
          f"N_g = {N_RAYOS} rayos")
    print(f"  Estimadores: {', '.join(ESTIMADORES_VALIDOS)}")

    planes = sorted(RUTA_PLANES.glob("*.json")) if RUTA_PLANES.exists() else []
    print(f"\nPlanes en {RUTA_PLANES.name}/: {len(planes)}")
    for plan in planes:
        print(f"  - {plan.name}")


def ejecutar_script(ruta_script):
    """Ejecuta un estudio en modo automático."""
    try:
        env = os.environ.copy()
        env['ANALISIS_AUTOMATICO'] = '1'
        resultado = subprocess.run(
            [sys.executable, str(ruta_script)],
            cwd=Path(__file__).parent,
            capture_output=False,
            env=env
        )
        return resultado.returncode == 0
    except Exception as e:
        print(f"\nERROR: Error al ejecutar script: {e}")
        return False


def ejecutar_todo(scripts_dir):
    """Ejecuta todos los estudios en secuencia."""
    tiempo_inicio = time.time()
    resultados = []
    for nombre, script in ESTUDIOS:
        print("\n" + "=" * 80)
        print(f"EJECUTANDO: {nombre}")
        print("=" * 80)
        inicio = time.time()
        exito = ejecutar_script(scripts_dir / script)
        resultados.append({'nombre': nombre, 'exito': exito, 'duracion': time.time() - inicio})

    duracion_total = time.time() - tiempo_inicio
    print("\n" + "=" * 80)
    print("SIMULACION COMPLETA FINALIZADA")
    print("=" * 80)
    print(f"\nTiempo total: {duracion_total/60:.1f} minutos ({duracion_total:.0f}s)")
    print("\nRESUMEN DE RESULTADOS:")
    print("-" * 80)
    for i, res in enumerate(resultados, 1):
        estado = "[OK]" if res['exito'] else "[ADVERTENCIA]"
        print(f"  {i}. {res['nombre']:<45} {estado:>15} ({res['duracion']:.1f}s)")

    print("\n" + "=" * 80)
    print("ARCHIVOS GENERADOS EN:")
    print("=" * 80)
    print(f"  Reportes CSV:      {RUTA_REPORTES}")
    print(f"  Visualizaciones:   {RUTA_VISUALIZACIONES}")
    return resultados


def menu_principal():
    """Menú principal del sistema."""
    mostrar_banner()
    mostrar_resumen()

    scripts_dir = Path(__file__).parent / "scripts"

    while True:
        print("\n" + "=" * 80)
        print("MENÚ PRINCIPAL")
        print("=" * 80)
        print("""
ESTUDIOS DISPONIBLES:

  [1] MSE vs ROT
      LS y PBCE frente a las fórmulas cerradas, T = 2 y T = 4

  [2] Throughput vs T
      δ óptimo y E[ρ] con ROT fijo

  [3] Baterías de validación
      Oráculos analíticos, recuperación sin rejilla y tasas

  [4] Ejecutar un plan propio
      Pide la ruta del plan JSON y la carpeta de salida

  ------------------------------------------------------------------------

  [T] EJECUTAR TODO

  [0] Salir
        """)

        opcion = input("Selecciona una opción: ").strip().upper()

        if opcion == '0':
            print("\nSaliendo del sistema...")
            break
        elif opcion in ('1', '2', '3'):
            nombre, script = ESTUDIOS[int(opcion) - 1]
            print("\n" + "=" * 80)
            print(f"EJECUTANDO: {nombre}")
            print("=" * 80)
            ejecutar_script(scripts_dir / script)
        elif opcion == '4':
            plan = input("Ruta del plan JSON: ").strip()
            salida = input("Carpeta de salida (ENTER = la del plan): ").strip()
            argumentos = ['run', '--plan', plan] + (['--out', salida] if salida else [])
            codigo = main_cli(argumentos)
            print(f"\nCódigo de salida: {codigo}")
        elif opcion == 'T':
            ejecutar_todo(scripts_dir)
        else:
            print("\nOpcion no valida. Intenta de nuevo.")

    print("\n" + "=" * 80)
    print("SISTEMA CERRADO")
    print("=" * 80)


if __name__ == "__main__":
    if len(sys.argv) > 1:
        sys.exit(main_cli(sys.argv[1:]))
    menu_principal()
