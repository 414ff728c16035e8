"""Array bundles, scan tables, run manifests and the run ledger"""
