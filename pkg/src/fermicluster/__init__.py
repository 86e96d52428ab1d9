"""Cluster-state preparation and entanglement analyzers built from fermionic parity gadgets."""
