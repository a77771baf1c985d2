# Generated by Django 5.0.1 on 2026-10-17 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SimulationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('scenario', models.CharField(max_length=64)),
                ('n', models.PositiveIntegerField()),
                ('replications', models.PositiveIntegerField()),
                ('seed', models.BigIntegerField()),
                ('divergence', models.CharField(default='chi2', max_length=32)),
                ('config', models.JSONField(blank=True, default=dict)),
                ('summary', models.JSONField(blank=True, default=dict)),
                ('status', models.CharField(choices=[('running', 'Running'), ('completed', 'Completed'), ('failed', 'Failed')], default='running', max_length=16)),
                ('failures', models.PositiveIntegerField(default=0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'db_table': 'simulation_run',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['scenario', 'n'], name='run_scenario_n_idx')],
            },
        ),
        migrations.CreateModel(
            name='ReplicationResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('rep', models.PositiveIntegerField()),
                ('lam', models.FloatField(blank=True, null=True)),
                ('theta', models.JSONField(blank=True, default=dict)),
                ('alpha', models.JSONField(blank=True, default=dict)),
                ('objective', models.FloatField(blank=True, null=True)),
                ('phi_plus', models.BooleanField(blank=True, null=True)),
                ('standard_errors', models.JSONField(blank=True, default=dict)),
                ('seconds', models.FloatField(default=0.0)),
                ('failed', models.BooleanField(default=False)),
                ('error', models.TextField(blank=True, default='')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='results', to='estimation.simulationrun')),
            ],
            options={
                'db_table': 'replication_result',
                'ordering': ['run', 'rep'],
                'constraints': [models.UniqueConstraint(fields=('run', 'rep'), name='uniq_rep_per_run')],
            },
        ),
        migrations.CreateModel(
            name='RunEvent',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('event_type', models.CharField(choices=[('estimation_started', 'Estimation started'), ('estimation_finished', 'Estimation finished'), ('start_failed', 'Start failed'), ('multistart_disagreement', 'Starts disagree'), ('few_constraints', 'Fewer constraints than parameters'), ('phi_plus_violation', 'Estimate outside Phi+'), ('quadrature_not_converged', 'Quadrature not converged'), ('xi_norm_large', 'Large dual vector'), ('tail_truncation', 'Truncated tail contribution'), ('simulation_started', 'Simulation started'), ('simulation_finished', 'Simulation finished'), ('replication_failed', 'Replication failed'), ('failure_rate_exceeded', 'Too many failed replications'), ('error', 'Error')], max_length=50)),
                ('message', models.TextField()),
                ('metadata', models.JSONField(blank=True, default=dict)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='events', to='estimation.simulationrun')),
            ],
            options={
                'db_table': 'run_event',
                'ordering': ['-created_at'],
            },
        ),
    ]
