import os


# CONSTANTS.
_VALID_SUFFIXES = {'.json', '.csv', '.png'}


def input_file(file_path: str, suffix: str = "") -> str:
    '''
    Returns 'file_path' after checking that it names an existing file with
    the given suffix.

    Notes
    -----
    Leaving 'suffix' empty accepts any file.
    '''
    if suffix != "":
        _verify_suffix(suffix)
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"File '{file_path}' was not found.")
    elif not os.path.isfile(file_path):
        raise IsADirectoryError(f"'{file_path}' is not a file.")
    _verify_file_suffix(file_path, suffix)
    return file_path


def output_file(file_path: str, suffix: str = "") -> str:
    '''
    Returns 'file_path' after checking its suffix and that its parent
    directory exists.
    '''
    if suffix != "":
        _verify_suffix(suffix)
    _verify_file_suffix(file_path, suffix)
    parent = os.path.dirname(os.path.abspath(file_path))
    if not os.path.isdir(parent):
        raise FileNotFoundError(f"Directory '{parent}' was not found.")
    return file_path


def _verify_suffix(suffix: str):
    if suffix not in _VALID_SUFFIXES:
        raise ValueError(f"Suffix '{suffix}' is not valid. Allowed suffixes are {sorted(_VALID_SUFFIXES)}.")


def _verify_file_suffix(file_path: str, suffix: str):
    if suffix != "" and not file_path.endswith(suffix):
        raise ValueError(f"'{file_path}' does not have the expected suffix '{suffix}'.")
