"""
Baterías de validación

Ejecuta las seis baterías (fórmulas cerradas del MSE, varianza del
producto, recuperación sin rejilla, tasas con estimación perfecta y las
dos de tendencia del experimento) y guarda el detalle de cada una en reportes/03_validacion.

En modo automático usa los parámetros reducidos de la CLI (--rapido).
"""

import os
import sys
from pathlib import Path

# Agregar rutas para importar módulos
sys.path.append(str(Path(__file__).parent.parent))

from configuracion.config import RUTA_REPORTES, asegurar_directorios, configurar_registro
from estimador_interferencia.linea_comandos import PARAMETROS_RAPIDOS
from estimador_interferencia.validacion import SUITES, ejecutar_suite

RUTA_REPORTES_VALIDACION = RUTA_REPORTES / "03_validacion"


def ejecutar(rapido):
    resultados = []
    for nombre in SUITES:
        print("\n" + "=" * 80)
        print(f"BATERÍA: {nombre}")
        print("=" * 80)
        resultado = ejecutar_suite(nombre, **(PARAMETROS_RAPIDOS[nombre] if rapido else {}))
        archivo = RUTA_REPORTES_VALIDACION / f"{nombre}.csv"
        resultado['detalles'].to_csv(archivo, index=False)
        estado = "[OK]" if resultado['aprobada'] else "[FALLIDA]"
        print(f"  {estado} ({resultado['tiempo_s']:.1f}s) -> {archivo.name}")
        resultados.append(resultado)
    return resultados


if __name__ == "__main__":
    configurar_registro()
    asegurar_directorios(RUTA_REPORTES_VALIDACION)

    if os.environ.get('ANALISIS_AUTOMATICO') == '1':
        print("\nModo automático: baterías reducidas\n")
        resultados = ejecutar(rapido=True)
    else:
        respuesta = input("¿Ejecutar las baterías completas? (s/N): ").strip().lower()
        resultados = ejecutar(rapido=respuesta != 's')

    print("\n" + "=" * 80)
    print("RESUMEN DE VALIDACIÓN")
    print("=" * 80)
    for resultado in resultados:
        estado = "[OK]" if resultado['aprobada'] else "[FALLIDA]"
        print(f"  {resultado['suite']:<15} {estado:>10}")

    sys.exit(0 if all(r['aprobada'] for r in resultados) else 1)
