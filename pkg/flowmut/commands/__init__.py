# Command modules for organizing CLI subcommands
