"""Solar panel orientation under arbitrary environmental illumination.

Library plus CLI for simulating panel irradiance, the four-detector
photodifferential controller, alternative minimal-sensing strategies,
and day-long energy harvesting with actuator accounting.
"""

__version__ = "0.1.0"
