"""Lorentz-atom toolkit: forced-oscillator response, Abraham-Lorentz roots and
run-away solutions, Kramers-Kronig checks, cross sections and the quantum
oscillator correspondence."""

__version__ = "0.1.0"
