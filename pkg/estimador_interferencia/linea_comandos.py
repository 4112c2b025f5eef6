"""
Interfaz de línea de comandos del simulador.

    run      --plan plan.json --out carpeta [--threads K] [--seed S]
    plots    --in carpeta [--render]
    validate --suite {mse-analysis, appendix, recovery, rate} [--rapido]

Códigos de salida: 0 correcto, 1 sin estimadores que graficar,
2 error de configuración, 3 fallos parciales de estimadores,
4 batería de validación no aprobada.
"""

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from configuracion.config import (
    SALIDA_OK,
    SALIDA_SIN_ESTIMADORES,
    SALIDA_ERROR_CONFIG,
    SALIDA_FALLOS_PARCIALES,
    SALIDA_VALIDACION_FALLIDA,
    configurar_registro,
)
from .errores import ErrorConfiguracion, ErrorEsquema, ErrorArgumentoInvalido
from .experimento import cargar_plan, ejecutar_experimento
from .graficas import emitir_graficas, renderizar_graficas
from .validacion import SUITES, ejecutar_suite

logger = logging.getLogger(__name__)

# Parámetros reducidos de cada batería para --rapido
PARAMETROS_RAPIDOS = {
    'mse-analysis': {'ensayos': 1000, 'tolerancia': 0.1},
    'appendix': {'n_sorteos': 200_000, 'tolerancia': 0.05},
    'recovery': {'instancias': 10},
    'rate': {'enlaces': 100},
    'mse-trend': {'ensayos': 50},
    'throughput-trend': {'ensayos': 30},
}


def construir_parser():
    parser = argparse.ArgumentParser(
        prog='estimador_interferencia',
        description='Estimación de la correlación espacial de la interferencia (LS / PBCE)')
    parser.add_argument('--log-level', default=None,
                        help='Nivel de log (DEBUG, INFO, WARNING, ERROR)')
    subparsers = parser.add_subparsers(dest='comando', required=True)

    run = subparsers.add_parser('run', help='Ejecuta un plan de Monte-Carlo')
    run.add_argument('--plan', required=True, type=Path, help='Plan del experimento (JSON)')
    run.add_argument('--out', type=Path, default=None, help='Carpeta de salida')
    run.add_argument('--threads', type=int, default=None,
                     help='Hilos para los ensayos (por defecto ESTIMADOR_HILOS o 1)')
    run.add_argument('--seed', type=int, default=None, help='Sustituye la semilla del plan')
    run.add_argument('--sin-progreso', action='store_true', help='Oculta la barra de progreso')

    plots = subparsers.add_parser('plots', help='Emite especificaciones JSON de gráficas')
    plots.add_argument('--in', dest='entrada', required=True, type=Path,
                       help='Carpeta con agregado.csv')
    plots.add_argument('--render', action='store_true', help='Genera además un PNG por gráfica')

    validate = subparsers.add_parser('validate', help='Ejecuta una batería de validación')
    validate.add_argument('--suite', required=True, choices=SUITES)
    validate.add_argument('--rapido', action='store_true',
                          help='Menos ensayos y tolerancias más holgadas')
    return parser


def comando_run(args):
    plan = cargar_plan(args.plan)
    if args.seed is not None:
        plan = dataclasses.replace(plan, semilla=args.seed)
    resultado = ejecutar_experimento(plan, hilos=args.threads, salida=args.out,
                                     mostrar_progreso=not args.sin_progreso)

    print("\n" + "=" * 80)
    print("EXPERIMENTO TERMINADO")
    print("=" * 80)
    for nombre, ruta in resultado['rutas'].items():
        print(f"  ✓ {nombre:<10} {ruta}")
    if resultado['n_errores']:
        print(f"\n[ADVERTENCIA] {resultado['n_errores']} filas con error de estimador")
        return SALIDA_FALLOS_PARCIALES
    return SALIDA_OK


def comando_plots(args):
    rutas = emitir_graficas(args.entrada)
    if not rutas:
        print("\nNo hay estimadores en el agregado; no se generaron gráficas")
        return SALIDA_SIN_ESTIMADORES
    print(f"\n✓ {len(rutas)} especificaciones en {rutas[0].parent}")
    if args.render:
        pngs = renderizar_graficas(rutas)
        print(f"✓ {len(pngs)} imágenes PNG")
    return SALIDA_OK


def comando_validate(args):
    parametros = PARAMETROS_RAPIDOS[args.suite] if args.rapido else {}
    resultado = ejecutar_suite(args.suite, **parametros)

    print("\n" + "=" * 80)
    print(f"BATERÍA: {resultado['suite']}")
    print("=" * 80)
    print(resultado['detalles'].to_string(index=False))
    estado = "[OK]" if resultado['aprobada'] else "[FALLIDA]"
    print(f"\n{estado} ({resultado['tiempo_s']:.1f}s)")
    return SALIDA_OK if resultado['aprobada'] else SALIDA_VALIDACION_FALLIDA


COMANDOS = {
    'run': comando_run,
    'plots': comando_plots,
    'validate': comando_validate,
}


def main(argv=None):
    """
    Punto de entrada de la CLI.

    Returns:
        int: Código de salida
    """
    args = construir_parser().parse_args(argv)
    configurar_registro(args.log_level)
    try:
        return COMANDOS[args.comando](args)
    except (ErrorConfiguracion, ErrorEsquema, ErrorArgumentoInvalido) as e:
        logger.error("%s", e)
        print(f"\nERROR: {e}")
        return SALIDA_ERROR_CONFIG


if __name__ == "__main__":
    sys.exit(main())
