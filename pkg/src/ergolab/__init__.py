"""ergolab command-line front end, experiment runner and artifact IO."""
