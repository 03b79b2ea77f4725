__requires__ = ['eventlet>=0.30.0']
