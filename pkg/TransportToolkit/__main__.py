from .Cli.CommandLine import main


if __name__ == "__main__":
    main()
