from .parameters import TestProcedure, Population, Calibration, TablePreset, ExitStatus
