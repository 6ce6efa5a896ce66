from .CommandLine import dispatch, main, build_parser
