from django import forms
from django.conf import settings
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from .exceptions import CapError
from .geometry import Point
from .mappings import DomainSpec, HybridParams, MappingSpec
from .projection import ConvexSet
from .scenarios import (CLASS_CHECKS, Candidates, Diagnostics, OrbitPlan, Sampling, Scenario,
                        SchemePlan)
from .schemes import ISHIKAWA, SchemeKind, StepSequence, StopRule


def parse(factory, value, what):
    """Run a ``from_json`` style factory, reporting library errors as validation errors."""
    try:
        return factory(value)
    except CapError as exc:
        raise ValidationError(_("Invalid %(what)s: %(error)s"), params={'what': what, 'error': exc},
                              code='invalid')


def require_object(value, what, allowed):
    if not isinstance(value, dict):
        raise ValidationError(_("%(what)s must be a JSON object"), params={'what': what}, code='invalid')
    unknown = sorted(set(value) - set(allowed))
    if unknown:
        raise ValidationError(_("%(what)s has unknown key(s): %(keys)s"),
                              params={'what': what, 'keys': ', '.join(unknown)}, code='unknown')
    return value


def positive_int(value, what, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValidationError(_("%(what)s must be a positive integer"), params={'what': what}, code='invalid')
    return value


def positive_float(value, what, allow_none=False):
    if value is None and allow_none:
        return None
    try:
        value = float(value)
    except (TypeError, ValueError):
        value = float('nan')
    if not value > 0.0 or value == float('inf'):
        raise ValidationError(_("%(what)s must be a positive number"), params={'what': what}, code='invalid')
    return value


class ScenarioForm(forms.Form):
    name = forms.SlugField(label=_("Name"))
    description = forms.CharField(required=False, label=_("Description"))
    domain = forms.JSONField(label=_("Domain"))
    mappings = forms.JSONField(label=_("Mappings"))
    params = forms.JSONField(label=_("Hybrid parameters"))
    checks = forms.JSONField(required=False, label=_("Class checks"))
    certificate = forms.JSONField(required=False, label=_("Berinde certificate"))
    fixed_points = forms.JSONField(required=False, label=_("Known common fixed points"))
    sampling = forms.JSONField(required=False, label=_("Sampling"))
    seed = forms.IntegerField(min_value=0, label=_("Seed"))
    tol = forms.FloatField(required=False, min_value=0.0, label=_("Tolerance"))
    schemes = forms.JSONField(required=False, label=_("Scheme runs"))
    probes = forms.JSONField(required=False, label=_("Probes"))
    orbit = forms.JSONField(required=False, label=_("Orbit check"))
    diagnostics = forms.JSONField(required=False, label=_("Diagnostics"))
    expected = forms.JSONField(required=False, label=_("Expected outcomes"))

    def clean_domain(self):
        return parse(DomainSpec.from_json, self.cleaned_data['domain'], _("domain"))

    def clean_params(self):
        return parse(HybridParams.from_json, self.cleaned_data['params'], _("hybrid parameters"))

    def clean_checks(self):
        checks = self.cleaned_data['checks'] or []
        if not isinstance(checks, list) or not all(isinstance(check, str) for check in checks):
            raise ValidationError(_("Class checks are a list of names"), code='invalid')
        unknown = [check for check in checks if check not in CLASS_CHECKS]
        if unknown:
            raise ValidationError(_("Unknown class check(s) %(unknown)s, choose from %(known)s"),
                                  params={'unknown': ', '.join(unknown), 'known': ', '.join(CLASS_CHECKS)},
                                  code='unknown')
        return tuple(checks)

    def clean_certificate(self):
        certificate = self.cleaned_data['certificate']
        if certificate is None:
            return None
        require_object(certificate, _("certificate"), ('a', 'L'))
        try:
            a, weight = float(certificate['a']), float(certificate['L'])
        except (KeyError, TypeError, ValueError):
            raise ValidationError(_("A certificate needs numeric 'a' and 'L'"), code='invalid')
        if not 0.0 < a < 1.0 or not weight >= 0.0:
            raise ValidationError(_("A certificate needs a in (0,1) and L >= 0"), code='invalid')
        return a, weight

    def clean_fixed_points(self):
        points = self.cleaned_data['fixed_points'] or []
        if not isinstance(points, list):
            raise ValidationError(_("Fixed points are a list of points"), code='invalid')
        return tuple(parse(Point.from_json, point, _("fixed point")) for point in points)

    def clean_sampling(self):
        sampling = self.cleaned_data['sampling']
        if sampling is None:
            return Sampling()
        require_object(sampling, _("sampling"), ('count', 'random_domain', 'pairs'))
        random_domain = sampling.get('random_domain', False)
        if not isinstance(random_domain, bool):
            raise ValidationError(_("random_domain must be true or false"), code='invalid')
        return Sampling(count=positive_int(sampling.get('count', Sampling.count), _("sample count")),
                        random_domain=random_domain,
                        pairs=positive_int(sampling.get('pairs'), _("pair count"), allow_none=True))

    def clean_tol(self):
        tol = self.cleaned_data['tol']
        if tol is None:
            return settings.CAP_ATOL
        if tol == 0.0:
            raise ValidationError(_("Tolerance must be positive"), code='invalid')
        return tol

    def clean_schemes(self):
        schemes = self.cleaned_data['schemes']
        if schemes is None:
            return None
        require_object(schemes, _("schemes"), ('kinds', 'steps', 'beta', 'x0', 'stop'))
        for key in ('kinds', 'steps', 'x0'):
            if key not in schemes:
                raise ValidationError(_("schemes needs '%(key)s'"), params={'key': key}, code='required')
        names = schemes['kinds']
        if not isinstance(names, list) or not names or not all(isinstance(name, str) for name in names):
            raise ValidationError(_("kinds is a non-empty list of scheme names"), code='invalid')
        if len(set(names)) != len(names):
            raise ValidationError(_("kinds lists a scheme twice"), code='invalid')
        steps = parse(StepSequence.from_json, schemes['steps'], _("step sequence"))
        beta = None
        if ISHIKAWA in names:
            if 'beta' not in schemes:
                raise ValidationError(_("ishikawa needs a 'beta' step sequence"), code='required')
            beta = parse(StepSequence.from_json, schemes['beta'], _("beta step sequence"))
        kinds = tuple(parse(lambda name: SchemeKind(name, beta if name == ISHIKAWA else None), name, _("scheme"))
                      for name in names)
        stop = require_object(schemes.get('stop') or {}, _("stop"), ('tol', 'max_iters', 'divergence_bound'))
        stop = StopRule(tol=positive_float(stop.get('tol', StopRule.tol), _("stop tolerance")),
                        max_iters=positive_int(stop.get('max_iters'), _("max_iters"), allow_none=True),
                        divergence_bound=positive_float(stop.get('divergence_bound'), _("divergence bound"),
                                                        allow_none=True))
        return SchemePlan(kinds, steps, parse(Point.from_json, schemes['x0'], _("x0")), stop)

    def clean_probes(self):
        probes = self.cleaned_data['probes'] or {}
        require_object(probes, _("probes"), ('z_ref', 'cap_set', 'candidates'))
        cleaned = {'z_ref': None, 'cap_set': None, 'candidates': None}
        if probes.get('z_ref') is not None:
            cleaned['z_ref'] = parse(Point.from_json, probes['z_ref'], _("z_ref"))
        if probes.get('cap_set') is not None:
            cleaned['cap_set'] = parse(ConvexSet.from_json, probes['cap_set'], _("cap_set"))
        if probes.get('candidates') is not None:
            candidates = require_object(probes['candidates'], _("candidates"), ('domain', 'count'))
            cleaned['candidates'] = Candidates(
                parse(DomainSpec.from_json, candidates.get('domain'), _("candidate domain")),
                positive_int(candidates.get('count', 201), _("candidate count")))
        return cleaned

    def clean_orbit(self):
        orbit = self.cleaned_data['orbit']
        if orbit is None:
            return None
        require_object(orbit, _("orbit"), ('start', 'horizon', 'bound'))
        if 'start' not in orbit:
            raise ValidationError(_("orbit needs a 'start' point"), code='required')
        return OrbitPlan(parse(Point.from_json, orbit['start'], _("orbit start")),
                         positive_int(orbit.get('horizon'), _("orbit horizon"), allow_none=True),
                         positive_float(orbit.get('bound'), _("orbit bound"), allow_none=True))

    def clean_diagnostics(self):
        diagnostics = self.cleaned_data['diagnostics'] or {}
        defaults = Diagnostics()
        require_object(diagnostics, _("diagnostics"), defaults.to_json())
        values = {}
        for key, default in defaults.to_json().items():
            value = diagnostics.get(key, default)
            values[key] = positive_int(value, key) if isinstance(default, int) else positive_float(value, key)
        return Diagnostics(**values)

    def clean_expected(self):
        expected = self.cleaned_data['expected'] or {}
        if not isinstance(expected, dict) or not all(isinstance(value, bool) for value in expected.values()):
            raise ValidationError(_("Expected outcomes map verdict names to true or false"), code='invalid')
        return expected

    def clean(self):
        cleaned_data = super().clean()
        domain = cleaned_data.get('domain')
        mappings = cleaned_data.get('mappings')
        if domain is None or mappings is None:
            return cleaned_data

        try:
            require_object(mappings, _("mappings"), ('S', 'T'))
            if 'T' not in mappings:
                raise ValidationError(_("mappings needs 'T'"), code='required')
            t = parse(lambda data: MappingSpec.from_json(data, domain), mappings['T'], _("mapping T"))
            s = t if mappings.get('S') is None else parse(
                lambda data: MappingSpec.from_json(data, domain), mappings['S'], _("mapping S"))
        except ValidationError as error:
            self.add_error('mappings', error)
            return cleaned_data
        if s.domain != t.domain or t.domain != domain:
            self.add_error('mappings', ValidationError(
                _("domain mismatch: S on %(s)s, T on %(t)s, scenario on %(domain)s"),
                params={'s': s.domain.describe(), 't': t.domain.describe(), 'domain': domain.describe()},
                code='domain'))
            return cleaned_data
        cleaned_data['s'], cleaned_data['t'] = s, t

        self._check_dimensions(cleaned_data, domain.dim)

        checks = cleaned_data.get('checks') or ()
        params = cleaned_data.get('params')
        if params is not None and 'wmgm' in checks and (params.varsigma is None or params.eta is None):
            self.add_error('params', _("The wmgm check needs 'varsigma' and 'eta'"))
        if 'berinde-quasi-contractive' in checks and cleaned_data.get('certificate') is None:
            self.add_error('certificate', _("The berinde-quasi-contractive check needs a certificate"))
        if 'quasi-nonexpansive' in checks and not cleaned_data.get('fixed_points'):
            self.add_error('fixed_points', _("The quasi-nonexpansive check needs fixed points"))

        schemes = cleaned_data.get('schemes')
        if schemes is not None and schemes.x0.dim == domain.dim and not domain.contains(schemes.x0):
            self.add_error('schemes', _("x0 lies outside the domain"))
        return cleaned_data

    def _check_dimensions(self, cleaned_data, dim):
        probes = cleaned_data.get('probes') or {}
        located = [('fixed_points', point) for point in cleaned_data.get('fixed_points') or ()]
        if cleaned_data.get('schemes') is not None:
            located.append(('schemes', cleaned_data['schemes'].x0))
        if cleaned_data.get('orbit') is not None:
            located.append(('orbit', cleaned_data['orbit'].start))
        for key in ('z_ref', 'cap_set'):
            if probes.get(key) is not None:
                located.append(('probes', probes[key]))
        if probes.get('candidates') is not None:
            located.append(('probes', probes['candidates'].domain))
        for name, item in located:
            if item.dim != dim:
                self.add_error(name, ValidationError(
                    _("dimension mismatch: %(dim)s-d value in a %(expected)s-d scenario"),
                    params={'dim': item.dim, 'expected': dim}, code='dimension'))

    def build(self):
        data = self.cleaned_data
        probes = data.get('probes') or {}
        return Scenario(
            name=data['name'],
            description=data['description'],
            domain=data['domain'],
            s=data['s'],
            t=data['t'],
            params=data['params'],
            seed=data['seed'],
            tol=data['tol'],
            checks=data['checks'],
            certificate=data['certificate'],
            fixed_points=data['fixed_points'],
            sampling=data['sampling'],
            schemes=data['schemes'],
            z_ref=probes.get('z_ref'),
            cap_set=probes.get('cap_set'),
            candidates=probes.get('candidates'),
            orbit=data['orbit'],
            diagnostics=data['diagnostics'],
            expected=data['expected'],
        )
