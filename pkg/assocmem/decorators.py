import functools
import logging

from .core import PartialWord

logger = logging.getLogger(__name__)


def require_query_length(retrieve_func):
    """
    Coerce the `q` argument of a memory's retrieve function into a `PartialWord` and check its length against
    the memory word length `n`. Raises `ValueError` on a length mismatch.

    The wrapped function is called as `retrieve_func(memory, q, *args, **kwargs)`; `memory` must expose `n`.
    """

    @functools.wraps(retrieve_func)
    def retrieve_func_wrapper(memory, q, *args, **kwargs):
        if q is None:
            raise ValueError('q is None')
        query = PartialWord(q)
        if len(query) != memory.n:
            reason = 'Query length {} does not match word length {}'.format(len(query), memory.n)
            logger.error(reason)
            raise ValueError(reason)
        return retrieve_func(memory, query, *args, **kwargs)

    return retrieve_func_wrapper
