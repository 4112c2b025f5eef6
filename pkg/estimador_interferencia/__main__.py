import sys

from .linea_comandos import main

sys.exit(main())
