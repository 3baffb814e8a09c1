# E2E tests for kgo-heun: the CLI run as a subprocess
