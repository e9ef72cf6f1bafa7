import logging

# Setup logger namespace
logger = logging.getLogger('harness')
