#!/usr/bin/env python3
"""
Punto de entrada: python -m flujo
"""
from flujo.cli.app import main

if __name__ == "__main__":
    main()
